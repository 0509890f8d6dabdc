#pragma once

// Prompt templates, response parsers and chat-completion providers.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "modelspace/edit_engine.hpp"
#include "modelspace/pddl.hpp"

namespace modelspace {

enum class PromptKind {
  kLlmOnlyUnsolvability,
  kLlmOnlyExecutability,
  kPostProcessorUnsolvability,
  kPostProcessorExecutability,
  kPreProcessorUnsolvability,
  kPreProcessorExecutability,
  kVerboseVariant,
};
std::string to_string(PromptKind kind);

struct PromptExtras {
  std::optional<std::vector<EditSet>> options;  // post-processor kinds
  std::optional<Plan> plan;                     // executability kinds
};

/// Fills the template for `kind`. Throws kMissingExtras when the options or
/// plan the template needs are absent.
std::string render_prompt(PromptKind kind, const Model& model, const PromptExtras& extras = {});

/// `['Option 1: (a) (b)',\n'Option 2: (not (c))']`
std::string render_options(const std::vector<EditSet>& options);

// ---------------------------------------------------------------------------
// Response parsing

enum class ResponseMode { kAuto, kAddOnly, kAddRemove, kFullInitBlock };

struct ParsedEdits {
  EditSet edits;
  std::vector<std::string> rejected;  // one note per skipped atom or line
  ResponseMode mode = ResponseMode::kAuto;  // the mode actually used
};

/// Throws UnparseableResponse when not a single atom can be read.
ParsedEdits parse_edit_response(std::string_view text, const Model& base,
                                 ResponseMode mode = ResponseMode::kAuto);

/// First integer in the text, 1-based. Throws kNoNumberFound or kOutOfRange.
std::size_t parse_option_choice(std::string_view text, std::size_t option_count);

struct RankedList {
  std::vector<ModelEdit> edits;  // additions, in the order given
  std::vector<std::string> diagnostics;
};

/// Keeps well-typed, new, non-repeated atoms up to `cap`. Throws
/// UnparseableResponse (carrying the diagnostics) when none survive.
RankedList parse_ranked_list(std::string_view text, const Model& base,
                             std::size_t cap = kMaxRankedEdits);

// ---------------------------------------------------------------------------
// Providers

struct ProviderConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4";
  std::size_t context_limit = 8192;  // tokens
  std::size_t reply_reserve = 512;   // tokens kept free for the answer
  double temperature = 0.0;
  int max_retries = 3;
  double timeout_seconds = 120.0;
  double backoff_seconds = 1.0;  // first retry delay, doubled each time
  std::string api_key_env = "MODELSPACE_API_KEY";
  std::size_t max_in_flight = 4;
};

struct ContextFit {
  std::size_t estimate = 0;  // tokens
  bool fits = true;
};

/// ceil(chars / 3): deliberately pessimistic for English and PDDL text.
std::size_t estimate_tokens(std::string_view text);
ContextFit check_context_fit(const ProviderConfig& cfg, std::string_view prompt);

struct LlmResponse {
  std::string text;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  std::string provider;
  std::string model;
  int attempts = 1;
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual LlmResponse complete(const std::string& prompt) = 0;
  virtual std::string name() const = 0;
};

/// Context check, then the provider call. Throws kContextOverflow.
LlmResponse complete(Provider& provider, const ProviderConfig& cfg, const std::string& prompt);

/// OpenAI-compatible chat endpoint. Retries rate limits, 5xx answers and
/// transport failures with exponential backoff. Safe to share between
/// threads; at most cfg.max_in_flight requests run at once.
std::unique_ptr<Provider> make_http_provider(const ProviderConfig& cfg);

/// 64-bit FNV-1a of the prompt, as 16 lowercase hex digits.
std::string fixture_key(std::string_view prompt);

/// Reads `<dir>/<fixture_key(prompt)>.txt`. A missing file is a
/// ProviderError with status 404.
std::unique_ptr<Provider> make_fixture_provider(const std::string& dir);

/// What the oracle knows about one instance.
struct OracleTruth {
  EditSet repair;  // the reasonable repair, adds and removals
  std::function<bool(const EditSet&)> preferred;  // for option picking
};

/// Answers every prompt kind from ground truth: lists the repair, ranks its
/// additions, or picks the first preferred option (option 1 when none is).
std::unique_ptr<Provider> make_oracle_provider(OracleTruth truth);

}  // namespace modelspace
