#include "doctest.h"

#include <algorithm>
#include <random>

#include "modelspace/error.hpp"
#include "modelspace/evaluation.hpp"
#include "support/oracles.hpp"

using namespace modelspace;

namespace {

PipelineOutcome record(const std::string& id, const std::string& domain, PipelineKind pipeline, bool sound,
                       bool preferred, FailureKind failure = FailureKind::kNone,
                       UseCase use_case = UseCase::kUnsolvability) {
  PipelineOutcome o;
  o.instance_id = id;
  o.domain = domain;
  o.pipeline = pipeline;
  o.use_case = use_case;
  o.provider = "mock";
  o.sound = sound;
  o.preferred = preferred;
  o.failure = failure;
  return o;
}

RepairTask t2_task(UseCase use_case) {
  RepairTask t;
  t.base = parse_model(oracle::data("t2/domain.pddl"), oracle::data("t2/problem_perturbed.pddl"));
  t.use_case = use_case;
  if (use_case == UseCase::kExecutability) t.target_plan = parse_plan(oracle::data("t2/target_plan.txt"));
  return t;
}

EditSet adds(const std::string& text) { return parse_edit_set(text); }

}  // namespace

TEST_CASE("soundness judge agrees with explicit-state search") {
  for (auto use_case : {UseCase::kUnsolvability, UseCase::kExecutability}) {
    const auto task = t2_task(use_case);
    for (const auto& e : build_edit_space(task.base)) {
      const EditSet set({e});
      const auto verdict = judge_soundness(task, set);
      CAPTURE(e.str());
      CHECK_FALSE(verdict.indeterminate);
      CHECK(verdict.sound == oracle::objective(task, apply_edits(task.base, set)));
    }
  }
}

TEST_CASE("soundness judge reports an exhausted budget") {
  const auto verdict = judge_soundness(t2_task(UseCase::kUnsolvability), adds("(+ (has_bus city_b city_c))"),
                                       SearchBudget{0, 60.0});
  CHECK_FALSE(verdict.sound);
  CHECK(verdict.indeterminate);
}

TEST_CASE("preference judge") {
  const auto task = t2_task(UseCase::kUnsolvability);
  const ReasonableFamily family{DomainKind::kTravel, task.base};
  CHECK(judge_preferred(adds("(+ (has_taxi city_b city_c))"), family));
  CHECK_FALSE(judge_preferred(adds("(+ (at city_c))"), family));
  CHECK_FALSE(judge_preferred(adds("(+ (has_taxi city_b city_c)) (+ (at city_c))"), family));
  // city_a and city_c are not neighbors.
  CHECK_FALSE(judge_preferred(adds("(+ (has_taxi city_a city_c))"), family));
  CHECK_FALSE(judge_preferred(EditSet{}, family));
  CHECK(judge_preferred(EditSet{}, family, false));
}

TEST_CASE("cells count sound over attempted and preferred over sound") {
  const std::vector<PipelineOutcome> records = {
      record("a", "travel", PipelineKind::kLlmOnly, true, true),
      record("b", "travel", PipelineKind::kLlmOnly, true, false),
      record("c", "travel", PipelineKind::kLlmOnly, false, false, FailureKind::kContextOverflow),
  };
  const auto report = aggregate(records);
  const auto& cell = report.cells.at({UseCase::kUnsolvability, "travel", PipelineKind::kLlmOnly, "mock"});
  CHECK(cell.sound_cell() == "2/3");
  CHECK(cell.preferred_cell() == "1/2");
  CHECK(cell.context_overflow == 1);
  CHECK(report.overall.at({UseCase::kUnsolvability, "", PipelineKind::kLlmOnly, "mock"}) == cell);
  CHECK(Tally{}.sound_cell() == "0/0");
  CHECK(Tally{}.preferred_cell() == "0/0");
}

TEST_CASE("preferred without sound is a schema error") {
  try {
    aggregate({record("a", "travel", PipelineKind::kLlmOnly, false, true)});
    FAIL("accepted an unsound preferred record");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSchemaError);
  }
}

TEST_CASE("aggregation ignores record order") {
  std::vector<PipelineOutcome> records;
  std::mt19937 rng(17);
  const char* domains[] = {"travel", "roomba", "barman-simple", "logistics-simple"};
  for (int i = 0; i < 80; ++i) {
    const bool sound = rng() % 3 != 0;
    const bool preferred = sound && rng() % 2 == 0;
    records.push_back(record("i" + std::to_string(i), domains[i % 4], static_cast<PipelineKind>(i % 3), sound,
                             preferred, FailureKind::kNone,
                             i % 2 ? UseCase::kExecutability : UseCase::kUnsolvability));
  }
  const auto json = report_json(aggregate(records));
  const auto md = report_markdown(aggregate(records));
  for (int round = 0; round < 5; ++round) {
    std::shuffle(records.begin(), records.end(), rng);
    CHECK(report_json(aggregate(records)) == json);
    CHECK(report_markdown(aggregate(records)) == md);
  }
  // Brute-force recount of one cell.
  std::size_t attempted = 0, sound = 0;
  for (const auto& r : records) {
    if (r.domain == "roomba" && r.pipeline == PipelineKind::kPostProcessor && r.use_case == UseCase::kExecutability) {
      ++attempted;
      sound += r.sound;
    }
  }
  const auto report = aggregate(records);
  const auto& cell = report.cells.at({UseCase::kExecutability, "roomba", PipelineKind::kPostProcessor, "mock"});
  CHECK(cell.attempted == attempted);
  CHECK(cell.sound == sound);
}

TEST_CASE("markdown tables follow the results layout") {
  const std::vector<PipelineOutcome> records = {
      record("t1", "travel", PipelineKind::kLlmOnly, true, true),
      record("r1", "roomba", PipelineKind::kLlmOnly, false, false),
      record("t1", "travel", PipelineKind::kPreProcessor, true, false),
  };
  const auto md = report_markdown(aggregate(records, {{"provider", "mock"}}));
  CHECK(md.find("## Unsolvability") != std::string::npos);
  CHECK(md.find("## Executability") == std::string::npos);
  CHECK(md.find("| Domain | LLM-only (mock) Sound | LLM-only (mock) Preferred | Pre-processor (mock) Sound | "
                "Pre-processor (mock) Preferred |") != std::string::npos);
  CHECK(md.find("| Travel | 1/1 | 1/1 | 1/1 | 0/1 |") != std::string::npos);
  CHECK(md.find("| Roomba | 0/1 | 0/0 | 0/0 | 0/0 |") != std::string::npos);
  CHECK(md.find("| Overall | 1/2 | 1/1 | 1/1 | 0/1 |") != std::string::npos);
  // Travel before Roomba.
  CHECK(md.find("| Travel") < md.find("| Roomba"));
  CHECK(md.find("- provider: mock") != std::string::npos);
}

TEST_CASE("bar data: one signed row per record") {
  const InstanceIndex index = {{"t1", {"travel", 2, 5}}, {"r1", {"roomba", 1, 7}}};
  const std::vector<PipelineOutcome> records = {
      record("t1", "travel", PipelineKind::kLlmOnly, true, true),
      record("r1", "roomba", PipelineKind::kLlmOnly, false, false),
  };
  const auto data = fig_data(records, index);
  REQUIRE(data.size() == 2);
  CHECK(data[0].instance_id == "t1");
  CHECK(data[0].value == 1);
  CHECK(data[0].edit_size == 2);
  CHECK(data[1].value == -1);
  CHECK(data[1].plan_size == 7);
  CHECK(fig_data_csv(data) ==
        "instance_id,domain,pipeline,edit_size,plan_size,value,use_case\n"
        "t1,travel,llm-only,2,5,1,unsolvability\n"
        "r1,roomba,llm-only,1,7,-1,unsolvability\n");
}

TEST_CASE("bar data needs every instance in the index") {
  try {
    fig_data({record("ghost", "travel", PipelineKind::kLlmOnly, true, true)}, {});
    FAIL("accepted an unknown instance");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownInstance);
  }
}
