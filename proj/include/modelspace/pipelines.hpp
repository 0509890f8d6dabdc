#pragma once

// The three ways of combining an LLM with the combinatorial search, run
// end to end on one repair task, plus the JSON Lines record format.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "modelspace/benchgen.hpp"
#include "modelspace/edit_engine.hpp"
#include "modelspace/llm.hpp"

namespace modelspace {

enum class PipelineKind { kLlmOnly, kPostProcessor, kPreProcessor };

/// llm-only, post-processor, pre-processor
std::string to_string(PipelineKind kind);
/// LLM-only, Post-processor, Pre-processor
std::string display_name(PipelineKind kind);
/// Accepts to_string() names and the short forms llm, post, pre.
PipelineKind parse_pipeline_kind(std::string_view name);
UseCase parse_use_case(std::string_view name);

enum class FailureKind { kNone, kContextOverflow, kNoSolution, kUnparseableResponse, kProviderError, kTimeout };
std::string to_string(FailureKind kind);

struct PipelineOutcome {
  std::string instance_id;
  std::string domain;
  UseCase use_case = UseCase::kUnsolvability;
  PipelineKind pipeline = PipelineKind::kLlmOnly;
  std::string provider;

  std::optional<EditSet> proposed;
  std::vector<EditSet> options;             // post-processor only
  std::optional<std::size_t> chosen_option;  // 1-based
  bool sound = false;
  bool preferred = false;  // implies sound
  bool indeterminate = false;  // soundness check ran out of budget

  FailureKind failure = FailureKind::kNone;
  std::optional<NoSolutionReason> no_solution;
  std::string failure_detail;
  std::vector<std::string> diagnostics;

  double llm_seconds = 0.0;
  double search_seconds = 0.0;
  double total_seconds = 0.0;
  std::uint64_t expansions = 0;

  std::string prompt;
  std::string response;
};

struct PipelineInput {
  std::string instance_id;
  std::string domain;
  RepairTask task;
  std::optional<ReasonableFamily> family;  // without one nothing is preferred
};

PipelineInput pipeline_input(const BenchInstance& inst, UseCase use_case);

struct PipelineSettings {
  ProviderConfig provider;
  SearchBudget unsolvability_budget{5'000, 60.0};
  SearchBudget executability_budget{10'000, 60.0};
  SearchBudget judge_budget{200'000, 60.0};
  bool verbose_prompt = false;  // LLM-only unsolvability asks for the easiest changes
  int content_retries = 0;      // extra calls after an unparseable reply
  std::size_t max_options = 20;

  const SearchBudget& search_budget(UseCase use_case) const;
};

/// Failures are recorded in the outcome; only programming errors escape.
PipelineOutcome run_llm_only(const PipelineInput& in, Provider& provider, const PipelineSettings& settings);
PipelineOutcome run_post_processor(const PipelineInput& in, Provider& provider,
                                   const PipelineSettings& settings);
PipelineOutcome run_pre_processor(const PipelineInput& in, Provider& provider,
                                  const PipelineSettings& settings);
PipelineOutcome run_pipeline(PipelineKind kind, const PipelineInput& in, Provider& provider,
                             const PipelineSettings& settings);

/// Repeats the parsing (and, for the pre-processor, the search) on the stored
/// response. Nothing when the stored response yields no edit set.
std::optional<EditSet> replay(const PipelineOutcome& outcome, const RepairTask& task,
                              const PipelineSettings& settings);

/// Ground truth for the oracle provider: the full repair, and the family as
/// the option preference.
OracleTruth oracle_truth(const BenchInstance& inst);

using ProviderFactory = std::function<std::shared_ptr<Provider>(const BenchInstance&)>;

struct BatchRun {
  std::vector<PipelineKind> pipelines;
  std::vector<UseCase> use_cases;
  PipelineSettings settings;
  std::size_t jobs = 1;
};

/// Every (instance, use case, pipeline) combination; sorted by instance id,
/// use case, then pipeline.
std::vector<PipelineOutcome> run_batch(const std::vector<BenchInstance>& instances, const ProviderFactory& providers,
                                       const BatchRun& run);

inline constexpr int kOutcomeSchemaVersion = 1;

std::string to_jsonl_line(const PipelineOutcome& outcome);
/// Throws Error(kSchemaError) on malformed lines or a different version.
PipelineOutcome from_jsonl_line(std::string_view line);
std::string to_jsonl(const std::vector<PipelineOutcome>& outcomes);
std::vector<PipelineOutcome> from_jsonl(std::string_view text);

}  // namespace modelspace
