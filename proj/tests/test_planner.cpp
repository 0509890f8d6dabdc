#include "doctest.h"

#include <random>

#include "modelspace/error.hpp"
#include "modelspace/planner.hpp"
#include "support/oracles.hpp"

using namespace modelspace;

namespace {

Model fixture(const std::string& d, const std::string& p) {
  return parse_model(oracle::data("fixtures/" + d + "_domain.pddl"),
                     oracle::data("fixtures/" + p + "_problem.pddl"));
}

// Random small tasks: a travel network plus a switch domain whose reachable
// states grow combinatorially.
Model random_task(std::mt19937_64& rng, int variant) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  if (variant % 2 == 0) {
    const int n = 3 + pick(4);
    std::string objs, init = "(at c0)";
    for (int i = 0; i < n; ++i) objs += " c" + std::to_string(i);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (pick(4) == 0) init += " (has_bus c" + std::to_string(i) + " c" + std::to_string(j) + ")";
        if (pick(5) == 0) init += " (has_taxi c" + std::to_string(i) + " c" + std::to_string(j) + ")";
      }
    }
    const std::string problem = "(define (problem r) (:domain domaingotocity) (:objects" + objs +
                                " - city) (:init " + init + ") (:goal (at c" + std::to_string(n - 1) + ")))";
    return parse_model(oracle::data("fixtures/d1_domain.pddl"), problem);
  }
  const std::string domain = R"(
    (define (domain switches)
      (:requirements :strips :typing)
      (:types light)
      (:predicates (on ?x - light) (off ?x - light) (wired ?x ?y - light))
      (:action flip_on :parameters (?x ?y - light)
        :precondition (and (off ?y) (on ?x) (wired ?x ?y))
        :effect (and (on ?y) (not (off ?y))))
      (:action flip_off :parameters (?x - light)
        :precondition (and (on ?x))
        :effect (and (off ?x) (not (on ?x)))))
  )";
  const int n = 3 + pick(3);
  std::string objs, init = "(on l0)";
  for (int i = 0; i < n; ++i) objs += " l" + std::to_string(i);
  for (int i = 1; i < n; ++i) init += " (off l" + std::to_string(i) + ")";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && pick(3) == 0) init += " (wired l" + std::to_string(i) + " l" + std::to_string(j) + ")";
    }
  }
  std::string goal;
  for (int i = 1; i < n; ++i) {
    if (pick(2) == 0) goal += " (on l" + std::to_string(i) + ")";
  }
  if (pick(3) == 0) goal += " (off l0)";
  const std::string problem = "(define (problem r) (:domain switches) (:objects" + objs +
                              " - light) (:init " + init + ") (:goal (and" + goal + ")))";
  return parse_model(domain, problem);
}

}  // namespace

TEST_CASE("taxi and bus network without a route is proven unsolvable") {
  const auto m = fixture("d1", "d1");
  const auto v = solve(m);
  CHECK(v.status == SolveStatus::kProvenUnsolvable);
  CHECK_FALSE(oracle::shortest_plan(m).has_value());
}

TEST_CASE("goal already true gives the empty plan") {
  const auto m = parse_model(oracle::data("fixtures/d1_domain.pddl"),
                             "(define (problem p) (:domain domaingotocity) (:objects a - city) (:init (at a)) (:goal (at a)))");
  const auto v = solve(m);
  REQUIRE(v.solved());
  CHECK(v.plan.steps.empty());
  CHECK(v.plan.cost == 0.0);
  const auto r = validate_plan(m, Plan{});
  CHECK(r.valid);
  CHECK(r.goal_satisfied);
}

TEST_CASE("barman plan fails on the missing clean shot") {
  auto m = fixture("d3", "d3");
  const auto plan = parse_plan(oracle::data("fixtures/d6_plan.txt"));
  auto r = validate_plan(m, plan);
  CHECK_FALSE(r.valid);
  REQUIRE(r.failing_step.has_value());
  CHECK(*r.failing_step == 1);
  REQUIRE(r.unmet_preconditions.size() == 1);
  CHECK(r.unmet_preconditions[0].str() == "(clean shot_a)");

  m.problem.init.push_back({"clean", {"shot_a"}});
  std::sort(m.problem.init.begin(), m.problem.init.end());
  r = validate_plan(m, plan);
  CHECK(r.valid);
  CHECK_FALSE(r.failing_step.has_value());
  CHECK(oracle::plan_valid(m, plan));
}

TEST_CASE("the travel plan from the executability example") {
  const auto m = fixture("d5", "d5");
  const auto plan = parse_plan(oracle::data("fixtures/d5_plan.txt"));
  const auto r = validate_plan(m, plan);
  CHECK_FALSE(r.valid);
  CHECK(*r.failing_step == 1);
  CHECK(r.unmet_preconditions[0].str() == "(has_bus city_b city_c)");
}

TEST_CASE("unknown or ill-typed steps are rejected") {
  const auto m = fixture("d3", "d3");
  auto code = [&](const std::string& text) {
    try {
      validate_plan(m, parse_plan(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIoError;
  };
  CHECK(code("(stir shaker_a)") == ErrorCode::kUnknownAction);
  CHECK(code("(shake cocktail_a ingredient_a ingredient_b)") == ErrorCode::kUnknownAction);
  CHECK(code("(shake shot_a ingredient_a ingredient_b shaker_a)") == ErrorCode::kUnknownAction);
  CHECK(code("(shake cocktail_a ingredient_a ingredient_z shaker_a)") == ErrorCode::kUnknownAction);
}

TEST_CASE("optimal plans match breadth-first search on random tasks") {
  std::mt19937_64 rng(20240601);
  int solved = 0, unsolvable = 0;
  for (int i = 0; i < 60; ++i) {
    const auto m = random_task(rng, i);
    CAPTURE(render_problem(m.problem));
    const auto v = solve(m);
    const auto expected = oracle::shortest_plan(m);
    REQUIRE(v.status != SolveStatus::kBudgetExhausted);
    if (expected) {
      ++solved;
      REQUIRE(v.solved());
      CHECK(v.plan.cost == doctest::Approx(*expected));
      CHECK(static_cast<int>(v.plan.size()) == *expected);
      CHECK(validate_plan(m, v.plan).valid);
      CHECK(oracle::plan_valid(m, v.plan));
    } else {
      ++unsolvable;
      CHECK(v.status == SolveStatus::kProvenUnsolvable);
    }
    const auto greedy = solve(ground_task(m), {}, {}, SearchMode::kGreedy);
    CHECK(greedy.solved() == expected.has_value());
    if (greedy.solved()) CHECK(validate_plan(m, greedy.plan).valid);
  }
  CHECK(solved >= 20);
  CHECK(unsolvable >= 5);
}

TEST_CASE("costs steer the search") {
  const auto m = parse_model(oracle::data("fixtures/d1_domain.pddl"), R"(
    (define (problem p) (:domain domaingotocity) (:objects a b c - city)
      (:init (at a) (has_bus a c) (has_taxi a b) (has_taxi b c)) (:goal (at c))))");
  const auto task = ground_task(m);
  std::vector<double> costs(task.actions.size(), 1.0);
  costs[*task.find_action("use_bus", {"a", "c"})] = 5.0;
  const auto v = solve(task, costs);
  REQUIRE(v.solved());
  CHECK(v.plan.size() == 2);
  CHECK(v.plan.cost == 2.0);
  const auto unit = solve(task);
  CHECK(unit.plan.size() == 1);
}

TEST_CASE("a zero budget exhausts before the first expansion") {
  const auto task = ground_task(fixture("d1", "d1"));
  const auto v = solve(task, {}, SearchBudget{0, 30});
  CHECK(v.status == SolveStatus::kBudgetExhausted);
  CHECK(v.stats.expansions == 0);
}

TEST_CASE("solving is deterministic") {
  const auto m = fixture("d5", "d5");
  const auto a = solve(m);
  const auto b = solve(m);
  CHECK(a.status == b.status);
  CHECK(a.plan == b.plan);
}
