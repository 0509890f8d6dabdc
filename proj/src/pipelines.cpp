#include "modelspace/pipelines.hpp"

#include <algorithm>
#include <chrono>
#include <tuple>
#include <variant>

#include <json.hpp>

#include "modelspace/error.hpp"
#include "modelspace/evaluation.hpp"
#include "modelspace/util.hpp"

namespace modelspace {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

PipelineOutcome start(const PipelineInput& in, PipelineKind kind, const Provider& provider) {
  PipelineOutcome o;
  o.instance_id = in.instance_id;
  o.domain = in.domain;
  o.use_case = in.task.use_case;
  o.pipeline = kind;
  o.provider = provider.name();
  return o;
}

// Calls the provider and records the exchange. False when the call failed;
// the failure is then already recorded.
bool ask(PipelineOutcome& o, Provider& provider, const PipelineSettings& settings, const std::string& prompt) {
  o.prompt = prompt;
  const auto t = Clock::now();
  try {
    o.response = complete(provider, settings.provider, prompt).text;
    o.llm_seconds += since(t);
    return true;
  } catch (const ProviderError& e) {
    o.failure = FailureKind::kProviderError;
    o.failure_detail = e.what();
  } catch (const Error& e) {
    o.failure = e.code() == ErrorCode::kContextOverflow ? FailureKind::kContextOverflow
                : e.code() == ErrorCode::kTimeout       ? FailureKind::kTimeout
                                                        : FailureKind::kProviderError;
    o.failure_detail = e.what();
  }
  o.llm_seconds += since(t);
  return false;
}

void unparseable(PipelineOutcome& o, const Error& e) {
  o.failure = FailureKind::kUnparseableResponse;
  o.failure_detail = e.what();
  if (const auto* u = dynamic_cast<const UnparseableResponse*>(&e)) {
    o.diagnostics.insert(o.diagnostics.end(), u->diagnostics().begin(), u->diagnostics().end());
  }
}

void no_solution(PipelineOutcome& o, NoSolutionReason reason) {
  o.failure = FailureKind::kNoSolution;
  o.no_solution = reason;
  o.failure_detail = "search found no edit set: " + to_string(reason);
}

// Edit sets from the search were verified on the way out, so soundness
// holds by construction; preference still has to be judged.
void accept_verified(PipelineOutcome& o, const PipelineInput& in, EditSet edits) {
  o.sound = true;
  o.preferred = in.family && judge_preferred(edits, *in.family, !edits.empty());
  o.proposed = std::move(edits);
}

PromptExtras extras_for(const RepairTask& task) {
  PromptExtras extras;
  if (task.use_case == UseCase::kExecutability) extras.plan = task.target_plan;
  return extras;
}

// The pre-processor's search over the ranked list.
RepairResult ranked_search(const RankedList& ranked, const RepairTask& task, const PipelineSettings& settings) {
  std::vector<ModelEdit> ordered;
  for (const auto& e : ranked.edits) ordered.push_back(e);
  return repair_min_cost(task, assign_rank_costs(ordered, RankOverflow::kTruncate),
                         settings.search_budget(task.use_case));
}

}  // namespace

std::string to_string(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::kLlmOnly: return "llm-only";
    case PipelineKind::kPostProcessor: return "post-processor";
    case PipelineKind::kPreProcessor: return "pre-processor";
  }
  return "?";
}

std::string display_name(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::kLlmOnly: return "LLM-only";
    case PipelineKind::kPostProcessor: return "Post-processor";
    case PipelineKind::kPreProcessor: return "Pre-processor";
  }
  return "?";
}

PipelineKind parse_pipeline_kind(std::string_view name) {
  if (name == "llm-only" || name == "llm") return PipelineKind::kLlmOnly;
  if (name == "post-processor" || name == "post") return PipelineKind::kPostProcessor;
  if (name == "pre-processor" || name == "pre") return PipelineKind::kPreProcessor;
  throw Error(ErrorCode::kOutOfRange, "unknown pipeline '" + std::string(name) + "'");
}

UseCase parse_use_case(std::string_view name) {
  if (name == "unsolvability") return UseCase::kUnsolvability;
  if (name == "executability") return UseCase::kExecutability;
  throw Error(ErrorCode::kOutOfRange, "unknown use case '" + std::string(name) + "'");
}

std::string to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::kNone: return "none";
    case FailureKind::kContextOverflow: return "context-overflow";
    case FailureKind::kNoSolution: return "no-solution";
    case FailureKind::kUnparseableResponse: return "unparseable-response";
    case FailureKind::kProviderError: return "provider-error";
    case FailureKind::kTimeout: return "timeout";
  }
  return "?";
}

const SearchBudget& PipelineSettings::search_budget(UseCase use_case) const {
  return use_case == UseCase::kUnsolvability ? unsolvability_budget : executability_budget;
}

PipelineInput pipeline_input(const BenchInstance& inst, UseCase use_case) {
  return {inst.id, to_string(inst.domain), inst.task(use_case), inst.family};
}

PipelineOutcome run_llm_only(const PipelineInput& in, Provider& provider, const PipelineSettings& settings) {
  const auto t0 = Clock::now();
  PipelineOutcome o = start(in, PipelineKind::kLlmOnly, provider);
  const auto& task = in.task;
  PromptKind kind = PromptKind::kLlmOnlyExecutability;
  if (task.use_case == UseCase::kUnsolvability) {
    kind = settings.verbose_prompt ? PromptKind::kVerboseVariant : PromptKind::kLlmOnlyUnsolvability;
  }
  const std::string prompt = render_prompt(kind, task.base, extras_for(task));

  std::optional<ParsedEdits> parsed;
  for (int call = 0; call <= std::max(0, settings.content_retries) && !parsed; ++call) {
    o.diagnostics.clear();
    if (!ask(o, provider, settings, prompt)) break;
    try {
      parsed = parse_edit_response(o.response, task.base);
      o.failure = FailureKind::kNone;
      o.failure_detail.clear();
    } catch (const Error& e) {
      unparseable(o, e);
    }
  }
  if (parsed) {
    o.diagnostics = parsed->rejected;
    o.proposed = parsed->edits;
    const auto t = Clock::now();
    try {
      const auto verdict = judge_soundness(task, parsed->edits, settings.judge_budget);
      o.sound = verdict.sound;
      o.indeterminate = verdict.indeterminate;
    } catch (const Error& e) {
      o.diagnostics.push_back(std::string("edits do not apply: ") + e.what());
    }
    o.search_seconds = since(t);
    o.preferred = o.sound && in.family && judge_preferred(parsed->edits, *in.family, !parsed->edits.empty());
  }
  o.total_seconds = since(t0);
  return o;
}

PipelineOutcome run_post_processor(const PipelineInput& in, Provider& provider,
                                   const PipelineSettings& settings) {
  const auto t0 = Clock::now();
  PipelineOutcome o = start(in, PipelineKind::kPostProcessor, provider);
  const auto& task = in.task;
  const PromptKind kind = task.use_case == UseCase::kUnsolvability ? PromptKind::kPostProcessorUnsolvability
                                                                   : PromptKind::kPostProcessorExecutability;

  // Options only lengthen the prompt, so an overflow without them skips the search.
  PromptExtras bare = extras_for(task);
  bare.options = std::vector<EditSet>{};
  const auto fit = check_context_fit(settings.provider, render_prompt(kind, task.base, bare));
  if (!fit.fits) {
    o.failure = FailureKind::kContextOverflow;
    o.failure_detail = "prompt needs about " + std::to_string(fit.estimate) + " tokens before any options";
    o.total_seconds = since(t0);
    return o;
  }

  std::vector<ModelEdit> space;
  try {
    space = build_edit_space(task.base);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptySpace) throw;
  }
  const auto t = Clock::now();
  const auto found = enumerate_solutions(task, space, settings.search_budget(task.use_case), settings.max_options);
  o.search_seconds = since(t);
  o.expansions = found.stats.expansions;
  if (found.options.empty()) {
    no_solution(o, found.failure.value_or(NoSolutionReason::kProvenInsufficient));
    o.total_seconds = since(t0);
    return o;
  }
  o.options = found.options;

  PromptExtras extras = extras_for(task);
  extras.options = found.options;
  const std::string prompt = render_prompt(kind, task.base, extras);
  for (int call = 0; call <= std::max(0, settings.content_retries) && !o.chosen_option; ++call) {
    if (!ask(o, provider, settings, prompt)) break;
    try {
      o.chosen_option = parse_option_choice(o.response, found.options.size());
      o.failure = FailureKind::kNone;
      o.failure_detail.clear();
    } catch (const Error& e) {
      unparseable(o, e);
    }
  }
  if (o.chosen_option) accept_verified(o, in, found.options[*o.chosen_option - 1]);
  o.total_seconds = since(t0);
  return o;
}

PipelineOutcome run_pre_processor(const PipelineInput& in, Provider& provider,
                                  const PipelineSettings& settings) {
  const auto t0 = Clock::now();
  PipelineOutcome o = start(in, PipelineKind::kPreProcessor, provider);
  const auto& task = in.task;
  const PromptKind kind = task.use_case == UseCase::kUnsolvability ? PromptKind::kPreProcessorUnsolvability
                                                                   : PromptKind::kPreProcessorExecutability;
  const std::string prompt = render_prompt(kind, task.base, extras_for(task));

  std::optional<RankedList> ranked;
  bool answered = false;
  for (int call = 0; call <= std::max(0, settings.content_retries) && !ranked; ++call) {
    if (!ask(o, provider, settings, prompt)) break;
    answered = true;
    o.diagnostics.clear();
    try {
      ranked = parse_ranked_list(o.response, task.base);
      o.failure = FailureKind::kNone;
      o.failure_detail.clear();
    } catch (const Error& e) {
      unparseable(o, e);
    }
  }
  if (!answered) {
    o.total_seconds = since(t0);
    return o;
  }

  const auto t = Clock::now();
  RepairResult result;
  if (ranked) {
    o.diagnostics = ranked->diagnostics;
    result = ranked_search(*ranked, task, settings);
  } else {
    // An empty list still lets the search confirm that nothing needs to
    // change.
    result = repair_min_cost(task, {}, settings.search_budget(task.use_case));
  }
  o.search_seconds = since(t);
  if (const auto* solution = std::get_if<RepairSolution>(&result)) {
    o.expansions = solution->stats.expansions;
    o.failure = FailureKind::kNone;
    o.failure_detail.clear();
    accept_verified(o, in, solution->edits);
  } else {
    const auto& none = std::get<NoSolution>(result);
    o.expansions = none.stats.expansions;
    if (ranked) no_solution(o, none.reason);
  }
  o.total_seconds = since(t0);
  return o;
}

PipelineOutcome run_pipeline(PipelineKind kind, const PipelineInput& in, Provider& provider,
                             const PipelineSettings& settings) {
  switch (kind) {
    case PipelineKind::kLlmOnly: return run_llm_only(in, provider, settings);
    case PipelineKind::kPostProcessor: return run_post_processor(in, provider, settings);
    case PipelineKind::kPreProcessor: return run_pre_processor(in, provider, settings);
  }
  throw Error(ErrorCode::kOutOfRange, "unknown pipeline");
}

std::optional<EditSet> replay(const PipelineOutcome& o, const RepairTask& task, const PipelineSettings& settings) {
  try {
    switch (o.pipeline) {
      case PipelineKind::kLlmOnly:
        return parse_edit_response(o.response, task.base).edits;
      case PipelineKind::kPostProcessor:
        if (o.options.empty()) return std::nullopt;
        return o.options[parse_option_choice(o.response, o.options.size()) - 1];
      case PipelineKind::kPreProcessor: {
        RepairResult result;
        try {
          result = ranked_search(parse_ranked_list(o.response, task.base), task, settings);
        } catch (const UnparseableResponse&) {
          result = repair_min_cost(task, {}, settings.search_budget(task.use_case));
        }
        if (const auto* s = std::get_if<RepairSolution>(&result)) return s->edits;
        return std::nullopt;
      }
    }
  } catch (const Error&) {
  }
  return std::nullopt;
}

OracleTruth oracle_truth(const BenchInstance& inst) {
  OracleTruth truth;
  truth.repair = inst.ground_truth_repair();
  truth.preferred = [family = inst.family](const EditSet& e) { return family.contains(e); };
  return truth;
}

std::vector<PipelineOutcome> run_batch(const std::vector<BenchInstance>& instances, const ProviderFactory& providers,
                                       const BatchRun& run) {
  struct Job {
    std::size_t instance;
    UseCase use_case;
    PipelineKind pipeline;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (auto u : run.use_cases) {
      for (auto p : run.pipelines) jobs.push_back({i, u, p});
    }
  }
  std::vector<PipelineOutcome> out(jobs.size());
  parallel_for(jobs.size(), run.jobs, [&](std::size_t j) {
    const auto& job = jobs[j];
    const auto& inst = instances[job.instance];
    auto provider = providers(inst);
    out[j] = run_pipeline(job.pipeline, pipeline_input(inst, job.use_case), *provider, run.settings);
  });
  std::stable_sort(out.begin(), out.end(), [](const PipelineOutcome& a, const PipelineOutcome& b) {
    return std::tie(a.instance_id, a.use_case, a.pipeline) < std::tie(b.instance_id, b.use_case, b.pipeline);
  });
  return out;
}

std::string to_jsonl_line(const PipelineOutcome& o) {
  nlohmann::ordered_json j;
  j["schema_version"] = kOutcomeSchemaVersion;
  j["instance_id"] = o.instance_id;
  j["domain"] = o.domain;
  j["use_case"] = to_string(o.use_case);
  j["pipeline"] = to_string(o.pipeline);
  j["provider"] = o.provider;
  j["proposed"] = o.proposed ? nlohmann::ordered_json(o.proposed->str()) : nlohmann::ordered_json(nullptr);
  auto options = nlohmann::ordered_json::array();
  for (const auto& e : o.options) options.push_back(e.str());
  j["options"] = options;
  j["chosen_option"] = o.chosen_option ? nlohmann::ordered_json(*o.chosen_option) : nlohmann::ordered_json(nullptr);
  j["sound"] = o.sound;
  j["preferred"] = o.preferred;
  j["indeterminate"] = o.indeterminate;
  j["failure"] = to_string(o.failure);
  j["no_solution_reason"] =
      o.no_solution ? nlohmann::ordered_json(to_string(*o.no_solution)) : nlohmann::ordered_json(nullptr);
  j["failure_detail"] = o.failure_detail;
  j["diagnostics"] = o.diagnostics;
  j["timings"] = {{"llm_seconds", o.llm_seconds},
                  {"search_seconds", o.search_seconds},
                  {"total_seconds", o.total_seconds}};
  j["expansions"] = o.expansions;
  j["prompt"] = o.prompt;
  j["response"] = o.response;
  return j.dump();
}

PipelineOutcome from_jsonl_line(std::string_view line) {
  PipelineOutcome o;
  try {
    const auto j = nlohmann::json::parse(line);
    const int version = j.at("schema_version").get<int>();
    if (version != kOutcomeSchemaVersion) {
      throw Error(ErrorCode::kSchemaError, "schema_version " + std::to_string(version) + " is not " +
                                               std::to_string(kOutcomeSchemaVersion));
    }
    o.instance_id = j.at("instance_id").get<std::string>();
    o.domain = j.at("domain").get<std::string>();
    o.use_case = parse_use_case(j.at("use_case").get<std::string>());
    o.pipeline = parse_pipeline_kind(j.at("pipeline").get<std::string>());
    o.provider = j.at("provider").get<std::string>();
    if (!j.at("proposed").is_null()) o.proposed = parse_edit_set(j["proposed"].get<std::string>());
    for (const auto& e : j.at("options")) o.options.push_back(parse_edit_set(e.get<std::string>()));
    if (!j.at("chosen_option").is_null()) o.chosen_option = j["chosen_option"].get<std::size_t>();
    o.sound = j.at("sound").get<bool>();
    o.preferred = j.at("preferred").get<bool>();
    o.indeterminate = j.at("indeterminate").get<bool>();
    const auto failure = j.at("failure").get<std::string>();
    bool known = false;
    for (auto f : {FailureKind::kNone, FailureKind::kContextOverflow, FailureKind::kNoSolution,
                   FailureKind::kUnparseableResponse, FailureKind::kProviderError, FailureKind::kTimeout}) {
      if (to_string(f) == failure) {
        o.failure = f;
        known = true;
      }
    }
    if (!known) throw Error(ErrorCode::kSchemaError, "unknown failure '" + failure + "'");
    if (!j.at("no_solution_reason").is_null()) {
      const auto reason = j["no_solution_reason"].get<std::string>();
      o.no_solution = reason == to_string(NoSolutionReason::kProvenInsufficient)
                          ? NoSolutionReason::kProvenInsufficient
                          : NoSolutionReason::kBudgetExhausted;
    }
    o.failure_detail = j.at("failure_detail").get<std::string>();
    o.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    const auto& timings = j.at("timings");
    o.llm_seconds = timings.at("llm_seconds").get<double>();
    o.search_seconds = timings.at("search_seconds").get<double>();
    o.total_seconds = timings.at("total_seconds").get<double>();
    o.expansions = j.at("expansions").get<std::uint64_t>();
    o.prompt = j.at("prompt").get<std::string>();
    o.response = j.at("response").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("bad outcome record: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchemaError) throw;
    throw Error(ErrorCode::kSchemaError, std::string("bad outcome record: ") + e.what());
  }
  if (o.preferred && !o.sound) throw Error(ErrorCode::kSchemaError, o.instance_id + ": preferred but not sound");
  return o;
}

std::string to_jsonl(const std::vector<PipelineOutcome>& outcomes) {
  std::string out;
  for (const auto& o : outcomes) out += to_jsonl_line(o) + "\n";
  return out;
}

std::vector<PipelineOutcome> from_jsonl(std::string_view text) {
  std::vector<PipelineOutcome> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) out.push_back(from_jsonl_line(line));
    pos = end + 1;
  }
  return out;
}

}  // namespace modelspace
