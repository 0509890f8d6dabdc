// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion and exits
// nonzero when any fails. The live-provider smoke run is not part of this.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "modelspace/benchgen.hpp"
#include "modelspace/error.hpp"
#include "modelspace/evaluation.hpp"
#include "modelspace/grounding.hpp"
#include "modelspace/llm.hpp"
#include "modelspace/pipelines.hpp"
#include "modelspace/planner.hpp"
#include "support/oracles.hpp"

using namespace modelspace;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Collects failures; a criterion passes when nothing was recorded.
struct Check {
  std::vector<std::string> problems;
  void expect(bool ok, const std::string& what) {
    if (!ok && problems.size() < 20) problems.push_back(what);
  }
};

struct Verdict {
  bool pass = false;
  std::string detail;
};

Verdict finish(const Check& c, const std::string& summary) {
  if (c.problems.empty()) return {true, summary};
  std::string detail = summary + "; " + std::to_string(c.problems.size()) + " problem(s): " + c.problems.front();
  for (std::size_t i = 1; i < c.problems.size() && i < 5; ++i) detail += " | " + c.problems[i];
  return {false, detail};
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

Model fixture(int i) {
  const std::string d = "fixtures/d" + std::to_string(i);
  return parse_model(oracle::data(d + "_domain.pddl"), oracle::data(d + "_problem.pddl"));
}

Plan fixture_plan(int i) { return parse_plan(oracle::data("fixtures/d" + std::to_string(i) + "_plan.txt")); }

GroundAtom atom(const std::string& text) { return parse_edit("(+ " + text + ")").atom; }

const std::vector<PipelineKind> kPipelines = {PipelineKind::kLlmOnly, PipelineKind::kPostProcessor,
                                              PipelineKind::kPreProcessor};
const std::vector<UseCase> kUseCases = {UseCase::kUnsolvability, UseCase::kExecutability};

// 50 instances per novel domain at default sizes.
std::vector<BenchInstance> novel_bench(std::uint64_t seed) {
  std::vector<BenchInstance> out;
  for (auto kind : novel_domain_kinds()) {
    BatchSpec spec;
    spec.domain = kind;
    spec.count = 50;
    spec.seed = seed;
    for (auto& inst : generate_batch(spec)) out.push_back(std::move(inst));
  }
  return out;
}

std::vector<PipelineOutcome> oracle_run(const std::vector<BenchInstance>& bench) {
  BatchRun run;
  run.pipelines = kPipelines;
  run.use_cases = kUseCases;
  const ProviderFactory factory = [](const BenchInstance& inst) -> std::shared_ptr<Provider> {
    return make_oracle_provider(oracle_truth(inst));
  };
  return run_batch(bench, factory, run);
}

const std::map<std::string, std::string> kRunMetadata = {{"provider", "mock-oracle"}, {"seed", "2024"}};

// Shared between criteria 7, 10 and 11.
struct OracleRun {
  std::vector<BenchInstance> bench;
  std::vector<PipelineOutcome> outcomes;
  double seconds = 0;
};

OracleRun& first_run() {
  static OracleRun run = [] {
    OracleRun r;
    const auto t = Clock::now();
    r.bench = novel_bench(2024);
    r.outcomes = oracle_run(r.bench);
    r.seconds = since(t);
    return r;
  }();
  return run;
}

// ---------------------------------------------------------------------------

Verdict parser_fidelity() {
  Check c;
  const auto t = Clock::now();
  for (int i = 1; i <= 6; ++i) {
    const auto m = fixture(i);
    const auto again = parse_model(render_domain(m.domain), render_problem(m.problem));
    c.expect(again == m, "d" + std::to_string(i) + " does not round-trip");
    c.expect(render_domain(again.domain) == render_domain(m.domain) &&
                 render_problem(again.problem) == render_problem(m.problem),
             "d" + std::to_string(i) + " renders differently after a round trip");
  }
  for (int i : {4, 5, 6}) {
    const auto plan = fixture_plan(i);
    c.expect(!plan.steps.empty(), "d" + std::to_string(i) + " plan is empty");
    c.expect(parse_plan(render_plan(plan)) == plan, "d" + std::to_string(i) + " plan does not round-trip");
  }
  const auto golden = [](PromptKind kind) { return oracle::data("prompts/" + to_string(kind) + ".txt"); };
  std::vector<EditSet> d2_opts, d5_opts;
  {
    const std::string text = oracle::data("fixtures/d2_options.txt");
    const std::regex entry(R"(\{'([^']*)'\})");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), entry); it != std::sregex_iterator(); ++it) {
      d2_opts.push_back(EditSet({add_edit(atom("(" + (*it)[1].str() + ")"))}));
    }
  }
  {
    const std::string text = oracle::data("fixtures/d5_options.txt");
    const std::regex entry(R"('Option \d+: ([^']*)')");
    const std::regex group(R"(\([^()]*\))");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), entry); it != std::sregex_iterator(); ++it) {
      const std::string body = (*it)[1].str();
      std::vector<ModelEdit> edits;
      for (auto g = std::sregex_iterator(body.begin(), body.end(), group); g != std::sregex_iterator(); ++g) {
        edits.push_back(add_edit(atom(g->str())));
      }
      d5_opts.emplace_back(std::move(edits));
    }
  }
  const std::vector<std::pair<PromptKind, std::string>> renders = {
      {PromptKind::kLlmOnlyUnsolvability, render_prompt(PromptKind::kLlmOnlyUnsolvability, fixture(1))},
      {PromptKind::kVerboseVariant, render_prompt(PromptKind::kVerboseVariant, fixture(1))},
      {PromptKind::kPostProcessorUnsolvability,
       render_prompt(PromptKind::kPostProcessorUnsolvability, fixture(2), {d2_opts, std::nullopt})},
      {PromptKind::kPreProcessorUnsolvability, render_prompt(PromptKind::kPreProcessorUnsolvability, fixture(3))},
      {PromptKind::kLlmOnlyExecutability,
       render_prompt(PromptKind::kLlmOnlyExecutability, fixture(4), {std::nullopt, fixture_plan(4)})},
      {PromptKind::kPostProcessorExecutability,
       render_prompt(PromptKind::kPostProcessorExecutability, fixture(5), {d5_opts, fixture_plan(5)})},
      {PromptKind::kPreProcessorExecutability,
       render_prompt(PromptKind::kPreProcessorExecutability, fixture(6), {std::nullopt, fixture_plan(6)})},
  };
  for (const auto& [kind, text] : renders) c.expect(text == golden(kind), to_string(kind) + " differs from golden");
  const double s = since(t);
  c.expect(s < 1.0, "took " + fmt_seconds(s));
  return finish(c, "6 models, 3 plans, 7 prompts in " + fmt_seconds(s));
}

Verdict objective_oracle() {
  Check c;
  const auto t = Clock::now();
  const auto bench = novel_bench(7);
  c.expect(bench.size() == 200, "generated " + std::to_string(bench.size()) + " instances");
  std::size_t ok = 0;
  for (const auto& inst : bench) {
    const auto original = solve(inst.solvable);
    const auto perturbed = solve(inst.perturbed).status;
    const Model restored_model = apply_edits(inst.perturbed, inst.ground_truth_repair());
    const auto restored = solve(restored_model);
    // Independent checks: the planner's plans replay in a separate simulator,
    // and explicit-state search finds no plan for the perturbed model.
    const bool plans_replay =
        oracle::plan_valid(inst.solvable, original.plan) && oracle::plan_valid(restored_model, restored.plan);
    const bool bfs_perturbed = oracle::shortest_plan(inst.perturbed).has_value();
    const bool good = original.status == SolveStatus::kSolved && perturbed == SolveStatus::kProvenUnsolvable &&
                      restored.status == SolveStatus::kSolved && plans_replay && !bfs_perturbed;
    c.expect(good, inst.id + ": original " + to_string(original.status) + ", perturbed " + to_string(perturbed) +
                       ", restored " + to_string(restored.status));
    ok += good;
  }
  const double s = since(t);
  c.expect(s < 300.0, "took " + fmt_seconds(s));
  return finish(c, std::to_string(ok) + "/" + std::to_string(bench.size()) + " in " + fmt_seconds(s));
}

Verdict compilation_equivalence() {
  Check c;
  const auto t = Clock::now();
  std::vector<BenchInstance> tiny;
  for (std::uint64_t seed = 1; tiny.size() < 10; ++seed) {
    tiny.push_back(perturb_unsolvable(generate_instance(DomainKind::kTravel, {3 + int(seed % 2), 0}, seed), 1, seed));
  }
  for (std::uint64_t seed = 1; tiny.size() < 20; ++seed) {
    tiny.push_back(perturb_unsolvable(generate_instance(DomainKind::kBarmanSimple, {1, 0}, seed), 1, seed));
  }
  std::size_t cases = 0, agree = 0;
  for (const auto& inst : tiny) {
    const Model compiled = compile_executability(inst.perturbed, inst.target_plan);
    EditSpaceOptions opts;
    opts.removes = true;
    const auto space = build_edit_space(inst.perturbed, opts);
    auto judge = [&](const EditSet& e) {
      const bool compiled_solvable = solve(apply_edits(compiled, e)).status == SolveStatus::kSolved;
      const Model repaired = apply_edits(inst.perturbed, e);
      const bool valid = validate_plan(repaired, inst.target_plan).valid;
      const bool brute = oracle::plan_valid(repaired, inst.target_plan);
      ++cases;
      const bool same = compiled_solvable == valid && valid == brute;
      agree += same;
      c.expect(same, inst.id + " " + e.str());
    };
    judge(EditSet{});
    for (std::size_t i = 0; i < space.size(); ++i) {
      judge(EditSet({space[i]}));
      for (std::size_t j = i + 1; j < space.size(); ++j) {
        if (space[i].atom == space[j].atom) continue;
        judge(EditSet({space[i], space[j]}));
      }
    }
  }
  const double s = since(t);
  c.expect(s < 120.0, "took " + fmt_seconds(s));
  return finish(c, std::to_string(agree) + "/" + std::to_string(cases) + " edit sets agree on " +
                       std::to_string(tiny.size()) + " instances in " + fmt_seconds(s));
}

Verdict min_cost_optimality() {
  Check c;
  const auto t = Clock::now();
  std::mt19937_64 rng(99);
  std::size_t exact = 0, n = 0;
  const DomainKind kinds[] = {DomainKind::kTravel, DomainKind::kLogisticsSimple};
  for (int i = 0; i < 20; ++i) {
    const auto kind = kinds[i % 2];
    const auto g = generate_instance(kind, accepted_sizes(kind).min, 100 + i);
    const auto inst = perturb_unsolvable(g, 1 + i % 2, 100 + i);
    const auto task = inst.task(i % 4 < 2 ? UseCase::kUnsolvability : UseCase::kExecutability);
    // The ground truth plus random distractors, 12 edits at most.
    auto pool = build_edit_space(inst.perturbed);
    std::shuffle(pool.begin(), pool.end(), rng);
    const EditSet truth = inst.ground_truth_adds();
    std::set<ModelEdit> chosen(truth.edits().begin(), truth.edits().end());
    for (const auto& e : pool) {
      if (chosen.size() >= 12) break;
      chosen.insert(e);
    }
    RankedEdits space;
    for (const auto& e : chosen) space.push_back({e, static_cast<double>(1 + rng() % 5)});
    std::shuffle(space.begin(), space.end(), rng);
    const auto brute = oracle::brute_min_cost(task, space);
    const auto result = repair_min_cost(task, space, SearchBudget{});
    ++n;
    if (const auto* sol = std::get_if<RepairSolution>(&result)) {
      const bool same = brute && *brute == sol->total_cost;
      c.expect(same, inst.id + ": search cost " + std::to_string(sol->total_cost) + ", brute force " +
                         (brute ? std::to_string(*brute) : "none"));
      exact += same;
    } else {
      const auto& none = std::get<NoSolution>(result);
      const bool same = !brute && none.reason == NoSolutionReason::kProvenInsufficient;
      c.expect(same, inst.id + ": search found nothing (" + to_string(none.reason) + ")");
      exact += same;
    }
  }
  const double s = since(t);
  c.expect(s < 120.0, "took " + fmt_seconds(s));
  return finish(c, std::to_string(exact) + "/" + std::to_string(n) + " exact in " + fmt_seconds(s));
}

Verdict rank_costs() {
  Check c;
  for (std::size_t l = 1; l <= kMaxRankedEdits; ++l) {
    std::vector<ModelEdit> edits;
    for (std::size_t i = 0; i < l; ++i) edits.push_back(add_edit(GroundAtom{"p" + std::to_string(i), {}}));
    const auto ranked = assign_rank_costs(edits);
    c.expect(ranked.size() == l, "length " + std::to_string(l));
    double prefix = 0;
    for (std::size_t k = 0; k + 1 < ranked.size(); ++k) {
      prefix += ranked[k].cost;
      c.expect(prefix < ranked[k + 1].cost, "l=" + std::to_string(l) + " k=" + std::to_string(k + 1));
    }
  }
  return finish(c, "lengths 1..20");
}

Verdict enumeration_contract() {
  Check c;
  const auto t = Clock::now();
  std::size_t sets = 0, runs = 0;
  for (auto kind : novel_domain_kinds()) {
    BatchSpec spec;
    spec.domain = kind;
    spec.count = 5;
    spec.seed = 31;
    for (const auto& inst : generate_batch(spec)) {
      for (auto use_case : kUseCases) {
        const auto task = inst.task(use_case);
        const auto found = enumerate_solutions(task, build_edit_space(inst.perturbed), enumeration_budget(use_case));
        ++runs;
        for (std::size_t i = 0; i < found.options.size(); ++i) {
          const auto& e = found.options[i];
          ++sets;
          c.expect(oracle::objective(task, apply_edits(task.base, e)), inst.id + " unsound " + e.str());
          c.expect(check_objective(task, apply_edits(task.base, e)).holds, inst.id + " fails re-check " + e.str());
          for (std::size_t j = 0; j < found.options.size(); ++j) {
            if (i != j) c.expect(!e.includes(found.options[j]), inst.id + " superset " + e.str());
          }
        }
      }
    }
  }
  const double s = since(t);
  return finish(c, std::to_string(sets) + " edit sets from " + std::to_string(runs) + " runs in " + fmt_seconds(s));
}

Verdict oracle_ceiling() {
  Check c;
  auto& run = first_run();
  c.expect(run.bench.size() == 200, "bench has " + std::to_string(run.bench.size()) + " instances");
  const auto report = aggregate(run.outcomes, kRunMetadata);
  std::ostringstream summary;
  for (const auto& [key, tally] : report.overall) {
    summary << to_string(key.use_case) << "/" << to_string(key.pipeline) << " " << tally.sound_cell() << " "
            << tally.preferred_cell() << "; ";
    c.expect(tally.attempted == 200, to_string(key.pipeline) + " attempted " + std::to_string(tally.attempted));
    c.expect(tally.sound == tally.attempted, to_string(key.pipeline) + " sound " + tally.sound_cell());
    if (key.pipeline != PipelineKind::kPostProcessor) {
      c.expect(tally.preferred == tally.sound, to_string(key.pipeline) + " preferred " + tally.preferred_cell());
    }
  }
  c.expect(report.overall.size() == 6, "expected 6 overall cells");
  const auto md = report_markdown(report);
  for (const char* needle : {"## Unsolvability", "## Executability", "| Travel |", "| Roomba |", "| Barman-S |",
                             "| Logistics-S |", "| Overall |", "LLM-only (mock-oracle) Sound",
                             "Post-processor (mock-oracle) Preferred", "Pre-processor (mock-oracle) Sound"}) {
    c.expect(md.find(needle) != std::string::npos, std::string("report lacks ") + needle);
  }
  c.expect(run.seconds < 600.0, "took " + fmt_seconds(run.seconds));
  return finish(c, summary.str() + "generation and runs " + fmt_seconds(run.seconds));
}

Verdict fixture_parsing() {
  Check c;
  const auto d1 = parse_edit_response(oracle::data("fixtures/d1_output.txt"), fixture(1));
  c.expect(d1.edits == EditSet({add_edit(atom("(at city_o)")), add_edit(atom("(at city_x)"))}), "d1: " + d1.edits.str());

  const auto d2 = parse_option_choice(oracle::data("fixtures/d2_output.txt"), 20);
  c.expect(d2 == 4, "d2 option " + std::to_string(d2));

  const auto d3 = parse_ranked_list(oracle::data("fixtures/d3_output.txt"), fixture(3));
  c.expect(d3.edits.size() == 9, "d3 kept " + std::to_string(d3.edits.size()));
  c.expect(!d3.edits.empty() && d3.edits.front().atom.str() == "(empty shaker_a)", "d3 first entry");

  const Model roomba = parse_model(oracle::data("roomba/domain.pddl"), oracle::data("roomba/problem.pddl"));
  const auto d4 = parse_edit_response(oracle::data("fixtures/d4_output.txt"), roomba);
  std::size_t d4_adds = 0, d4_removes = 0;
  for (const auto& e : d4.edits.edits()) (e.kind == EditKind::kAdd ? d4_adds : d4_removes)++;
  c.expect(d4_adds == 2 && d4_removes == 2,
           "d4: " + std::to_string(d4_adds) + " adds, " + std::to_string(d4_removes) + " removes");

  const auto d5 = parse_option_choice(oracle::data("fixtures/d5_output.txt"), 20);
  c.expect(d5 == 1, "d5 option " + std::to_string(d5));

  bool d6_unparseable = false;
  try {
    parse_ranked_list(oracle::data("fixtures/d6_output.txt"), fixture(6));
  } catch (const UnparseableResponse&) {
    d6_unparseable = true;
  }
  c.expect(d6_unparseable, "d6 reply names objects the model lacks yet parsed");
  return finish(c, "d1 2 adds, d2 option 4, d3 9 ranked, d4 2+2, d5 option 1, d6 unparseable");
}

Verdict context_limit() {
  Check c;
  // A 400-city bus line with one missing link renders far past 4,096 tokens.
  const auto travel = generate_instance(DomainKind::kTravel, {3, 0}, 1).model;
  std::string problem = "(define (problem oversized) (:domain " + travel.domain.name + ") (:objects";
  for (int i = 0; i < 400; ++i) problem += " city_" + std::to_string(i);
  problem += " - city) (:init (at city_0)";
  for (int i = 0; i + 1 < 400; ++i) {
    const auto a = "city_" + std::to_string(i), b = "city_" + std::to_string(i + 1);
    problem += " (neighboring " + a + " " + b + ")";
    if (i != 200) problem += " (has_bus " + a + " " + b + ")";
  }
  problem += ") (:goal (at city_399)))";
  PipelineInput big;
  big.instance_id = "oversized";
  big.domain = to_string(DomainKind::kTravel);
  big.task.base = parse_model(render_domain(travel.domain), problem);
  big.family = ReasonableFamily{DomainKind::kTravel, big.task.base};
  OracleTruth big_truth;
  big_truth.repair = parse_edit_set("(+ (has_bus city_200 city_201))");

  BatchSpec spec;
  spec.count = 1;
  const auto small = generate_batch(spec).front();

  PipelineSettings settings;
  settings.provider.context_limit = 4096;
  std::vector<PipelineOutcome> outcomes;
  for (auto kind : kPipelines) {
    auto provider = make_oracle_provider(big_truth);
    outcomes.push_back(run_pipeline(kind, big, *provider, settings));
    provider = make_oracle_provider(oracle_truth(small));
    outcomes.push_back(run_pipeline(kind, pipeline_input(small, UseCase::kUnsolvability), *provider, settings));
  }
  for (const auto& o : outcomes) {
    if (o.instance_id == "oversized") {
      c.expect(o.failure == FailureKind::kContextOverflow, to_string(o.pipeline) + " failure " + to_string(o.failure));
      c.expect(!o.sound && !o.proposed, to_string(o.pipeline) + " produced an answer");
    } else {
      c.expect(o.sound, to_string(o.pipeline) + " small instance unsound");
    }
  }
  const auto report = aggregate(outcomes);
  for (const auto& [key, tally] : report.overall) {
    c.expect(tally.sound_cell() == "1/2", to_string(key.pipeline) + " cell " + tally.sound_cell());
    c.expect(tally.context_overflow == 1, to_string(key.pipeline) + " overflow count");
  }
  const auto estimate = estimate_tokens(render_prompt(PromptKind::kLlmOnlyUnsolvability, big.task.base));
  c.expect(estimate > 4096, "oversized prompt estimates only " + std::to_string(estimate) + " tokens");
  return finish(c, "prompt estimate " + std::to_string(estimate) +
                       " tokens; overflow counted in attempted, never in sound");
}

Verdict figure_data() {
  Check c;
  auto& run = first_run();
  const auto index = instance_index(run.bench);
  const auto data = fig_data(run.outcomes, index);
  c.expect(data.size() == run.bench.size() * kPipelines.size() * kUseCases.size(),
           "rows " + std::to_string(data.size()));
  std::set<std::string> ids;
  for (const auto& d : data) {
    ids.insert(d.instance_id);
    c.expect(d.value == 1, d.instance_id + " " + to_string(d.pipeline) + " is -1");
    c.expect(d.edit_size >= 1 && d.edit_size <= 4, d.instance_id + " edit size " + std::to_string(d.edit_size));
    c.expect(d.plan_size == index.at(d.instance_id).plan_size, d.instance_id + " plan size");
  }
  c.expect(ids.size() == run.bench.size(), "instances covered " + std::to_string(ids.size()));

  auto corrupted = run.outcomes;
  corrupted[17].sound = false;
  corrupted[17].preferred = false;
  const auto csv = fig_data_csv(fig_data(corrupted, index));
  const auto& victim = corrupted[17];
  const std::string row = victim.instance_id + "," + victim.domain + "," + to_string(victim.pipeline) + "," +
                          std::to_string(index.at(victim.instance_id).edit_size) + "," +
                          std::to_string(index.at(victim.instance_id).plan_size) + ",-1," +
                          to_string(victim.use_case) + "\n";
  c.expect(csv.find(row) != std::string::npos, "corrupted row missing: " + row);
  std::size_t negatives = 0;
  for (std::size_t p = csv.find(",-1,"); p != std::string::npos; p = csv.find(",-1,", p + 1)) ++negatives;
  c.expect(negatives == 1, std::to_string(negatives) + " negative rows after one corruption");
  return finish(c, std::to_string(data.size()) + " rows, all +1; one corrupted record flips to -1");
}

Verdict determinism() {
  Check c;
  auto& first = first_run();
  const auto t = Clock::now();
  const auto bench = novel_bench(2024);
  const auto outcomes = oracle_run(bench);
  const auto a = report_json(aggregate(first.outcomes, kRunMetadata));
  const auto b = report_json(aggregate(outcomes, kRunMetadata));
  c.expect(a == b, "report.json differs between runs");
  c.expect(to_jsonl(first.outcomes).size() > 0, "empty results");
  return finish(c, std::to_string(a.size()) + " bytes identical; second run " + fmt_seconds(since(t)));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"parser and rendering fidelity", parser_fidelity},
      {"objective oracle on 200 instances", objective_oracle},
      {"executability compilation equivalence", compilation_equivalence},
      {"min-cost optimality", min_cost_optimality},
      {"rank-cost prefix dominance", rank_costs},
      {"enumeration contract", enumeration_contract},
      {"oracle ceiling", oracle_ceiling},
      {"fixture-driven reply parsing", fixture_parsing},
      {"context-limit behavior", context_limit},
      {"bar chart data", figure_data},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << v.detail
              << std::endl;
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
