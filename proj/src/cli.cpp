#include "modelspace/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <json.hpp>

#include "modelspace/benchgen.hpp"
#include "modelspace/error.hpp"
#include "modelspace/evaluation.hpp"
#include "modelspace/pipelines.hpp"
#include "modelspace/util.hpp"

namespace modelspace {

namespace {

namespace fs = std::filesystem;

// Thrown for bad flag values that CLI11 cannot check on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "3" or "1..4"
std::pair<int, int> int_range(const std::string& flag, const std::string& text) {
  try {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw UsageError(flag + ": expected N or N..M, got '" + text + "'");
  }
}

SizeParams size_value(const std::string& flag, const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) return {std::stoi(text), 0};
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw UsageError(flag + ": expected N or RxC, got '" + text + "'");
  }
}

// "5..10", "3x3..5x5" or a single size.
SizeRange size_range(const std::string& flag, const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const auto s = size_value(flag, text);
    return {s, s};
  }
  return {size_value(flag, text.substr(0, dots)), size_value(flag, text.substr(dots + 2))};
}

std::vector<DomainKind> domain_list(const std::string& text) {
  if (text == "all") return all_domain_kinds();
  if (text == "novel") return novel_domain_kinds();
  std::vector<DomainKind> out;
  for (const auto& name : split(text, ',')) {
    try {
      out.push_back(parse_domain_kind(name));
    } catch (const Error&) {
      throw UsageError("--domain: unknown domain '" + name + "'");
    }
  }
  return out;
}

struct Common {
  std::string provider = "mock-oracle";
  ProviderConfig llm;
  std::uint64_t budget_uns = 5'000;
  std::uint64_t budget_exec = 10'000;
  double time_seconds = 60.0;
  bool full_scale = false;
  std::size_t jobs = 1;
  bool verbose_prompt = false;
  int content_retries = 0;

  PipelineSettings settings() const {
    if (budget_uns == 0 || budget_exec == 0 || time_seconds <= 0) {
      throw UsageError("--budget-uns, --budget-exec and --time must be positive");
    }
    PipelineSettings s;
    s.provider = llm;
    const double seconds = full_scale ? 7200.0 : time_seconds;
    s.unsolvability_budget = {budget_uns, seconds};
    s.executability_budget = {budget_exec, seconds};
    s.judge_budget.max_seconds = seconds;
    s.verbose_prompt = verbose_prompt;
    s.content_retries = content_retries;
    return s;
  }

  // One provider for everything, or one per instance for the oracle.
  ProviderFactory factory() const {
    if (provider == "mock-oracle") {
      return [](const BenchInstance& inst) -> std::shared_ptr<Provider> {
        return make_oracle_provider(oracle_truth(inst));
      };
    }
    std::shared_ptr<Provider> shared = single(EditSet{});
    return [shared](const BenchInstance&) { return shared; };
  }

  std::shared_ptr<Provider> single(const EditSet& oracle_repair) const {
    if (provider == "mock-oracle") {
      OracleTruth truth;
      truth.repair = oracle_repair;
      return make_oracle_provider(truth);
    }
    if (provider.rfind("mock-dir:", 0) == 0) return make_fixture_provider(provider.substr(9));
    if (provider == "live") return make_http_provider(llm);
    throw UsageError("--provider: expected mock-oracle, mock-dir:PATH or live, got '" + provider + "'");
  }

  std::string config_hash() const {
    const std::string text = provider + "|" + llm.endpoint + "|" + llm.model + "|" + std::to_string(llm.context_limit) +
                             "|" + std::to_string(llm.reply_reserve) + "|" + std::to_string(llm.temperature);
    return fixture_key(text);
  }
};

void add_common(CLI::App& app, Common& c) {
  auto* g = app.add_option_group("Provider and budgets");
  g->add_option("--provider", c.provider, "mock-oracle, mock-dir:PATH or live")->capture_default_str();
  g->add_option("--endpoint", c.llm.endpoint, "chat-completion URL for the live provider")->capture_default_str();
  g->add_option("--model", c.llm.model)->capture_default_str();
  g->add_option("--context-limit", c.llm.context_limit, "tokens")->capture_default_str();
  g->add_option("--reply-reserve", c.llm.reply_reserve, "tokens kept free for the reply")->capture_default_str();
  g->add_option("--temperature", c.llm.temperature)->capture_default_str();
  g->add_option("--max-retries", c.llm.max_retries)->capture_default_str();
  g->add_option("--timeout", c.llm.timeout_seconds, "seconds per request")->capture_default_str();
  g->add_option("--backoff", c.llm.backoff_seconds, "seconds before the first retry")->capture_default_str();
  g->add_option("--max-in-flight", c.llm.max_in_flight)->capture_default_str();
  g->add_option("--api-key-env", c.llm.api_key_env)->capture_default_str();
  g->add_option("--budget-uns", c.budget_uns, "expansions, unsolvability")->capture_default_str();
  g->add_option("--budget-exec", c.budget_exec, "expansions, executability")->capture_default_str();
  g->add_option("--time", c.time_seconds, "seconds per search")->capture_default_str();
  g->add_flag("--full-scale", c.full_scale, "two-hour search limit");
  g->add_option("--jobs", c.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  g->add_flag("--verbose-prompt", c.verbose_prompt, "ask LLM-only for the easiest changes");
  g->add_option("--content-retries", c.content_retries, "extra calls after an unparseable reply")
      ->capture_default_str();
}

std::vector<PipelineKind> pipeline_list(const std::string& text) {
  std::vector<PipelineKind> out;
  for (const auto& name : split(text, ',')) {
    if (name == "all") return {PipelineKind::kLlmOnly, PipelineKind::kPostProcessor, PipelineKind::kPreProcessor};
    try {
      out.push_back(parse_pipeline_kind(name));
    } catch (const Error&) {
      throw UsageError("--pipeline: unknown pipeline '" + name + "'");
    }
  }
  return out;
}

std::vector<UseCase> use_case_list(const std::string& text) {
  std::vector<UseCase> out;
  for (const auto& name : split(text, ',')) {
    if (name == "both") return {UseCase::kUnsolvability, UseCase::kExecutability};
    try {
      out.push_back(parse_use_case(name));
    } catch (const Error&) {
      throw UsageError("--use-case: unknown use case '" + name + "'");
    }
  }
  return out;
}

InstanceFacts read_facts(const fs::path& dir, std::string& id) {
  try {
    const auto j = nlohmann::json::parse(read_text_file(dir / "ground_truth.json"));
    id = j.at("id").get<std::string>();
    return {j.at("domain").get<std::string>(), j.at("k").get<int>(), j.at("plan_size").get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaError, (dir / "ground_truth.json").string() + ": " + e.what());
  }
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model-space repair of planning tasks with optional LLM help", "modelspace"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key = value file; flags override it");
  Common common;
  add_common(app, common);

  // gen
  auto* gen = app.add_subcommand("gen", "emit benchmark instances");
  std::string gen_domain;
  std::size_t gen_count = 10;
  std::string gen_k = "1..4";
  std::uint64_t gen_seed = 1;
  std::string gen_size;
  std::string gen_out;
  gen->add_option("--domain", gen_domain, "comma list, 'novel' or 'all'")->required();
  gen->add_option("--count", gen_count, "instances per domain")->capture_default_str();
  gen->add_option("--k", gen_k, "deleted facts, N or N..M within 1..4")->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--size", gen_size, "N..M, or RxC..RxC for grids; default per domain");
  gen->add_option("--out", gen_out, "bench directory")->required();

  // repair
  auto* repair = app.add_subcommand("repair", "repair one domain/problem[/plan]");
  std::string r_domain, r_problem, r_plan, r_pipeline = "cs", r_allow, r_oracle, r_out, r_model_out;
  bool r_removes = false;
  repair->add_option("--domain", r_domain, "domain file")->required()->check(CLI::ExistingFile);
  repair->add_option("--problem", r_problem, "problem file")->required()->check(CLI::ExistingFile);
  repair->add_option("--plan", r_plan, "target plan; switches to executability")->check(CLI::ExistingFile);
  repair->add_option("--pipeline", r_pipeline, "cs, llm, post or pre")->capture_default_str();
  repair->add_option("--allow", r_allow, "comma list of predicates the edits may use");
  repair->add_flag("--removes", r_removes, "also consider removing init facts (cs only)");
  repair->add_option("--oracle-edits", r_oracle, "what mock-oracle answers, e.g. \"(+ (at city_c))\"");
  repair->add_option("--out", r_out, "JSON Lines outcome file");
  repair->add_option("--write-model", r_model_out, "repaired problem file (cs only)");

  // run
  auto* run = app.add_subcommand("run", "run pipelines over a bench directory");
  std::string run_bench, run_pipes = "all", run_use = "both", run_out;
  run->add_option("--bench", run_bench, "bench directory")->required()->check(CLI::ExistingDirectory);
  run->add_option("--pipeline", run_pipes, "comma list of llm, post, pre, or all")->capture_default_str();
  run->add_option("--use-case", run_use, "unsolvability, executability or both")->capture_default_str();
  run->add_option("--out", run_out, "JSON Lines results")->required();

  // report
  auto* report = app.add_subcommand("report", "aggregate results into tables and bar data");
  std::string rep_results, rep_bench, rep_out;
  report->add_option("--results", rep_results, "JSON Lines results")->required()->check(CLI::ExistingFile);
  report->add_option("--bench", rep_bench, "bench directory, needed for figdata.csv")
      ->check(CLI::ExistingDirectory);
  report->add_option("--out", rep_out, "output directory")->required();

  // validate
  auto* validate = app.add_subcommand("validate", "check a plan; exit 0 if valid, 1 if not");
  std::string v_domain, v_problem, v_plan;
  validate->add_option("--domain", v_domain)->required()->check(CLI::ExistingFile);
  validate->add_option("--problem", v_problem)->required()->check(CLI::ExistingFile);
  validate->add_option("--plan", v_plan)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (gen->parsed()) {
      const auto [k_min, k_max] = int_range("--k", gen_k);
      if (k_min < 1 || k_max > 4 || k_min > k_max) throw UsageError("--k: must lie within 1..4, got " + gen_k);
      const auto domains = domain_list(gen_domain);
      if (!gen_size.empty() && domains.size() != 1) throw UsageError("--size needs exactly one domain");
      std::size_t written = 0;
      for (auto kind : domains) {
        BatchSpec spec;
        spec.domain = kind;
        spec.count = gen_count;
        spec.k_min = k_min;
        spec.k_max = k_max;
        spec.seed = gen_seed;
        spec.jobs = common.jobs;
        if (!gen_size.empty()) spec.sizes = size_range("--size", gen_size);
        for (const auto& inst : generate_batch(spec)) {
          write_instance(fs::path(gen_out) / inst.id, inst);
          ++written;
        }
      }
      out << "wrote " << written << " instances to " << gen_out << "\n";
      return 0;
    }

    if (validate->parsed()) {
      const Model m = parse_model(read_text_file(v_domain), read_text_file(v_problem));
      const auto report_v = validate_plan(m, parse_plan(read_text_file(v_plan)));
      if (report_v.valid) {
        out << "valid\n";
        return 0;
      }
      if (report_v.failing_step) {
        out << "invalid: step " << *report_v.failing_step + 1 << " has unmet preconditions";
        for (const auto& a : report_v.unmet_preconditions) out << " " << a.str();
        out << "\n";
      } else {
        out << "invalid: goal not reached\n";
      }
      return 1;
    }

    if (repair->parsed()) {
      const std::string domain_text = read_text_file(r_domain);
      RepairTask task;
      task.base = parse_model(domain_text, read_text_file(r_problem));
      if (!r_plan.empty()) {
        task.use_case = UseCase::kExecutability;
        task.target_plan = parse_plan(read_text_file(r_plan));
      }
      const auto settings = common.settings();
      if (r_pipeline == "cs") {
        EditSpaceOptions opts;
        if (!r_allow.empty()) {
          const auto names = split(r_allow, ',');
          opts.allow = std::set<std::string>(names.begin(), names.end());
        }
        opts.removes = r_removes;
        std::vector<ModelEdit> space;
        try {
          space = build_edit_space(task.base, opts);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kEmptySpace) throw;
        }
        const auto found = enumerate_solutions(task, space, settings.search_budget(task.use_case), 20);
        if (found.options.empty()) {
          out << "no solution: " << to_string(found.failure.value_or(NoSolutionReason::kProvenInsufficient))
              << "\n";
          return 1;
        }
        const EditSet& best = found.options.front();
        out << "edits: " << (best.empty() ? "(none)" : best.str()) << "\n";
        out << "size: " << best.size() << "\n";
        if (!r_model_out.empty()) {
          write_file_atomic(r_model_out, render_problem(apply_edits(task.base, best).problem));
        }
        return 0;
      }
      PipelineKind kind;
      try {
        kind = parse_pipeline_kind(r_pipeline);
      } catch (const Error&) {
        throw UsageError("--pipeline: expected cs, llm, post or pre, got '" + r_pipeline + "'");
      }
      const auto provider = common.single(r_oracle.empty() ? EditSet{} : parse_edit_set(r_oracle));
      PipelineInput input{fs::path(r_problem).stem().string(), task.base.domain.name, task, std::nullopt};
      const auto outcome = run_pipeline(kind, input, *provider, settings);
      out << "failure: " << to_string(outcome.failure);
      if (!outcome.failure_detail.empty()) out << " (" << outcome.failure_detail << ")";
      out << "\n";
      if (outcome.proposed) out << "edits: " << (outcome.proposed->empty() ? "(none)" : outcome.proposed->str()) << "\n";
      out << "sound: " << (outcome.sound ? "yes" : "no") << "\n";
      if (!r_out.empty()) write_file_atomic(r_out, to_jsonl(std::vector<PipelineOutcome>{outcome}));
      return outcome.sound ? 0 : 1;
    }

    if (run->parsed()) {
      BatchRun batch;
      batch.pipelines = pipeline_list(run_pipes);
      batch.use_cases = use_case_list(run_use);
      batch.settings = common.settings();
      batch.jobs = common.jobs;
      const auto factory = common.factory();
      std::vector<BenchInstance> instances;
      for (const auto& dir : list_instances(run_bench)) instances.push_back(read_instance(dir));
      const auto outcomes = run_batch(instances, factory, batch);
      write_file_atomic(run_out, to_jsonl(outcomes));
      nlohmann::ordered_json meta = {
          {"provider", common.provider},
          {"provider_config_hash", common.config_hash()},
          {"budget_uns", batch.settings.unsolvability_budget.max_expansions},
          {"budget_exec", batch.settings.executability_budget.max_expansions},
          {"time_seconds", batch.settings.unsolvability_budget.max_seconds},
          {"instances", instances.size()},
      };
      std::set<std::uint64_t> seeds;
      for (const auto& inst : instances) seeds.insert(inst.seed);
      std::uint64_t seed_digest = 0;
      for (auto s : seeds) seed_digest = seed_digest * 1099511628211ull ^ s;
      meta["instance_seed_digest"] = std::to_string(seed_digest);
      write_file_atomic(run_out + ".meta.json", meta.dump(2) + "\n");
      std::size_t sound = 0;
      for (const auto& o : outcomes) sound += o.sound ? 1 : 0;
      out << "ran " << outcomes.size() << " pipeline runs on " << instances.size() << " instances; " << sound
          << " sound\n";
      return 0;
    }

    if (report->parsed()) {
      const auto records = from_jsonl(read_text_file(rep_results));
      std::map<std::string, std::string> metadata;
      metadata["records"] = std::to_string(records.size());
      if (fs::exists(rep_results + ".meta.json")) {
        const auto meta = nlohmann::json::parse(read_text_file(rep_results + ".meta.json"));
        for (const auto& [k, v] : meta.items()) metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
      const auto agg = aggregate(records, metadata);
      write_file_atomic(fs::path(rep_out) / "report.json", report_json(agg));
      write_file_atomic(fs::path(rep_out) / "report.md", report_markdown(agg));
      if (!rep_bench.empty()) {
        InstanceIndex index;
        for (const auto& dir : list_instances(rep_bench)) {
          std::string id;
          auto facts = read_facts(dir, id);
          index[id] = facts;
        }
        write_file_atomic(fs::path(rep_out) / "figdata.csv", fig_data_csv(fig_data(records, index)));
      }
      out << report_markdown(agg);
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace modelspace
