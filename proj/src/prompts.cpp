#include "modelspace/error.hpp"
#include "modelspace/llm.hpp"

namespace modelspace {

namespace {

// Slots: {domain} {problem} {plan} {options}
constexpr const char* kLlmOnlyUnsolvability =
    "given the following problem and domain files:{domain},{problem}Come up with most reasonable set "
    "of additions that you can make to the initial state that will make it solvable. I want you to "
    "only list the predicates to be added to the initial states without any explanation or "
    "additional sentences in the beginning.";

constexpr const char* kVerbose =
    "given the following problem and domain files:{domain},{problem}Select the set of changes that "
    "would be the easiest to realize in the real world. I want you to only list the predicates to "
    "be added to the initial states without any explanation or additional sentences in the "
    "beginning.";

constexpr const char* kLlmOnlyExecutability =
    "given the following problem and domain and plan files:{domain},{problem},{plan},Come up with "
    "most reasonable set of additions and deletes that you can make to the initial state to make "
    "the plan executable.I want you to list two sets of predicates 1) predicates to be added to "
    "the initial states 2) predicates to be removed from the initial states. Give me the "
    "predicates without any explanation or additional sentences in the beginning.";

constexpr const char* kPostUnsolvability =
    "Given the following problem, domain files, and options list:\n"
    "- Problem: {problem}\n"
    "- Domain: {domain}\n"
    "- Options: {options}\n"
    "Pick the most reasonable option from the list that you can apply to the initial state to "
    "make the problem solvable. Only provide the number of the option selected and no other "
    "information (exclude even the term option).";

constexpr const char* kPostExecutability =
    "Given the following problem, domain files, and options list:\n"
    "- Problem: {problem}\n"
    "- Domain: {domain}\n"
    "- Options: {options}\n"
    "\n"
    "\n"
    "Pick the most reasonable option from the list that you can apply to the initial state to "
    "make the following plan executable.\n"
    "- Plan: {plan}\n"
    "Only provide the number of the option selected and no other information (exclude even the "
    "term option).";

constexpr const char* kPreUnsolvability =
    "Given the following problem and domain file: Problem:{problem} Domain:\n {domain} Come up "
    "with a list of twenty predicates that are currently missing from the initial state. Order "
    "the predicates in such a way that the predicates in the top correspond to changes that are "
    "most reasonable to make (the predicate will added to the existing initial state). Only list "
    "the initial state predicate, one predicate in a line, and provide no other information. Do "
    "not include any number in the list and do not include any text before the list.";

constexpr const char* kPreExecutability =
    "Given the following problem, domain, and plan file: Problem: {problem} Domain: {domain} "
    "Plan: {plan} Come up with a list of twenty predicates that are currently missing from the "
    "initial state to make the plan executable. Order the predicates in such a way that the "
    "predicates in the top correspond to changes that are most reasonable to make (the predicate "
    "will added to the existing initial state). Only list the initial state predicate, one "
    "predicate in a line, and provide no other information. Do not include any number in the "
    "list and do not include any text before the list.";

const char* template_for(PromptKind kind) {
  switch (kind) {
    case PromptKind::kLlmOnlyUnsolvability: return kLlmOnlyUnsolvability;
    case PromptKind::kLlmOnlyExecutability: return kLlmOnlyExecutability;
    case PromptKind::kPostProcessorUnsolvability: return kPostUnsolvability;
    case PromptKind::kPostProcessorExecutability: return kPostExecutability;
    case PromptKind::kPreProcessorUnsolvability: return kPreUnsolvability;
    case PromptKind::kPreProcessorExecutability: return kPreExecutability;
    case PromptKind::kVerboseVariant: return kVerbose;
  }
  return "";
}

std::string option_body(const EditSet& e) {
  if (e.empty()) return "(no changes)";
  std::string out;
  for (const auto& edit : e.edits()) {
    if (!out.empty()) out += ' ';
    out += edit.kind == EditKind::kAdd ? edit.atom.str() : "(not " + edit.atom.str() + ")";
  }
  return out;
}

}  // namespace

std::string to_string(PromptKind kind) {
  switch (kind) {
    case PromptKind::kLlmOnlyUnsolvability: return "llm-only-unsolvability";
    case PromptKind::kLlmOnlyExecutability: return "llm-only-executability";
    case PromptKind::kPostProcessorUnsolvability: return "post-processor-unsolvability";
    case PromptKind::kPostProcessorExecutability: return "post-processor-executability";
    case PromptKind::kPreProcessorUnsolvability: return "pre-processor-unsolvability";
    case PromptKind::kPreProcessorExecutability: return "pre-processor-executability";
    case PromptKind::kVerboseVariant: return "verbose-variant";
  }
  return "?";
}

std::string render_options(const std::vector<EditSet>& options) {
  std::string out = "[";
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i > 0) out += ",\n";
    out += "'Option " + std::to_string(i + 1) + ": " + option_body(options[i]) + "'";
  }
  return out + "]";
}

std::string render_prompt(PromptKind kind, const Model& model, const PromptExtras& extras) {
  const std::string tpl = template_for(kind);
  std::string out;
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    const auto open = tpl.find('{', pos);
    if (open == std::string::npos) {
      out.append(tpl, pos);
      break;
    }
    out.append(tpl, pos, open - pos);
    const auto close = tpl.find('}', open);
    const std::string slot = tpl.substr(open + 1, close - open - 1);
    if (slot == "domain") {
      out += render_domain(model.domain);
    } else if (slot == "problem") {
      out += render_problem(model.problem);
    } else if (slot == "plan") {
      if (!extras.plan) throw Error(ErrorCode::kMissingExtras, to_string(kind) + " needs a plan");
      out += render_plan(*extras.plan);
    } else if (slot == "options") {
      if (!extras.options) throw Error(ErrorCode::kMissingExtras, to_string(kind) + " needs options");
      out += render_options(*extras.options);
    }
    pos = close + 1;
  }
  return out;
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 2) / 3; }

ContextFit check_context_fit(const ProviderConfig& cfg, std::string_view prompt) {
  ContextFit fit;
  fit.estimate = estimate_tokens(prompt);
  fit.fits = fit.estimate + cfg.reply_reserve <= cfg.context_limit;
  return fit;
}

}  // namespace modelspace
