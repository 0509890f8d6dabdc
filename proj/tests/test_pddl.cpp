#include "doctest.h"

#include <functional>
#include <map>
#include <set>

#include "modelspace/error.hpp"
#include "modelspace/grounding.hpp"
#include "modelspace/pddl.hpp"
#include "support/oracles.hpp"

using namespace modelspace;

namespace {

Model fixture(const std::string& tag) {
  return parse_model(oracle::data("fixtures/" + tag + "_domain.pddl"),
                     oracle::data("fixtures/" + tag + "_problem.pddl"));
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kIoError;
}

const char* kTinyDomain = R"(
(define (domain tiny)
  (:requirements :strips :typing)
  (:types city)
  (:predicates (at ?x - city) (road ?x ?y - city))
  (:action go :parameters (?a ?b - city)
    :precondition (and (at ?a) (road ?a ?b))
    :effect (and (not (at ?a)) (at ?b))))
)";

}  // namespace

TEST_CASE("travel domain has four predicates and two actions") {
  const auto d = parse_domain(oracle::data("fixtures/d1_domain.pddl"));
  CHECK(d.name == "domaingotocity");
  CHECK(d.predicates.size() == 4);
  REQUIRE(d.actions.size() == 2);
  CHECK(d.find_action("use_taxi") != nullptr);
  CHECK(d.find_action("use_bus") != nullptr);
}

TEST_CASE("barman domain has seven predicates and two actions") {
  const auto d = parse_domain(oracle::data("fixtures/d3_domain.pddl"));
  CHECK(d.predicates.size() == 7);
  CHECK(d.actions.size() == 2);
  CHECK(d.is_subtype("shot", "container"));
  CHECK(d.is_subtype("cocktail", "beverage"));
  CHECK_FALSE(d.is_subtype("shot", "beverage"));
}

TEST_CASE("minimal domain without actions") {
  const auto d = parse_domain("(define (domain d) (:requirements :strips) (:predicates (p)))");
  CHECK(d.predicates.size() == 1);
  CHECK(d.actions.empty());
}

TEST_CASE("travel problem objects and goal") {
  const auto m = fixture("d1");
  CHECK(m.problem.objects.size() == 14);
  REQUIRE(m.problem.goal.size() == 1);
  CHECK(m.problem.goal[0].str() == "(at city_c)");
}

TEST_CASE("cleaning problem has doors, rooms and a clean goal") {
  const auto m = fixture("d4");
  int doors = 0, rooms = 0;
  for (const auto& [name, type] : m.problem.objects) {
    doors += type == "door";
    rooms += type == "room";
  }
  CHECK(doors == 4);
  CHECK(rooms == 8);
  CHECK(m.problem.goal[0].str() == "(is_clean room_b)");
}

TEST_CASE("empty init and goal are accepted") {
  const auto d = parse_domain(kTinyDomain);
  const auto p = parse_problem("(define (problem p) (:domain tiny) (:objects a - city) (:init) (:goal (and)))", d);
  CHECK(p.init.empty());
  CHECK(p.goal.empty());
}

TEST_CASE("parse errors carry a code") {
  CHECK(code_of([] { parse_domain("(define (domain d) (:predicates (p)"); }) == ErrorCode::kSyntaxError);
  CHECK(code_of([] {
          parse_domain("(define (domain d) (:requirements :strips :conditional-effects) (:predicates (p)))");
        }) == ErrorCode::kUnsupportedFeature);
  CHECK(code_of([] {
          parse_domain(R"((define (domain d) (:predicates (p ?x))
            (:action a :parameters (?x) :precondition (not (p ?x)) :effect (p ?x))))");
        }) == ErrorCode::kUnsupportedFeature);
  CHECK(code_of([] {
          parse_domain(R"((define (domain d) (:predicates (p ?x))
            (:action a :parameters (?x) :precondition (p ?x ?x) :effect (p ?x))))");
        }) == ErrorCode::kArityMismatch);
  const auto d = parse_domain(kTinyDomain);
  CHECK(code_of([&] { parse_problem("(define (problem p) (:domain tiny) (:objects a - city) (:init (fly a)) (:goal (at a)))", d); }) ==
        ErrorCode::kUnknownPredicate);
  CHECK(code_of([&] { parse_problem("(define (problem p) (:domain tiny) (:objects a - town) (:init) (:goal (at a)))", d); }) ==
        ErrorCode::kUnknownType);
  CHECK(code_of([&] { parse_problem("(define (problem p) (:domain tiny) (:objects a - city) (:init (at b)) (:goal (at a)))", d); }) ==
        ErrorCode::kUnknownObject);
}

TEST_CASE("syntax errors report a position") {
  try {
    parse_domain("(define (domain d)\n  (:predicates (p))\n  )\n)");
    FAIL("expected a syntax error");
  } catch (const ParseError& e) {
    CHECK(e.code() == ErrorCode::kSyntaxError);
    CHECK(e.line() == 4);
  }
}

TEST_CASE("rendering round-trips every fixture model") {
  for (const char* tag : {"d1", "d2", "d3", "d4", "d5", "d6"}) {
    CAPTURE(tag);
    const auto m = fixture(tag);
    const auto text_d = render_domain(m.domain);
    const auto text_p = render_problem(m.problem);
    const auto again = parse_model(text_d, text_p);
    CHECK(again == m);
    CHECK(render_domain(again.domain) == text_d);
    CHECK(render_problem(again.problem) == text_p);
  }
}

TEST_CASE("init atoms render in sorted order") {
  const auto d = parse_domain(R"((define (domain o) (:predicates (at ?x) (p ?x ?y))))");
  const auto p = parse_problem("(define (problem q) (:domain o) (:objects b a) (:init (p b a) (at a)) (:goal (and)))", d);
  CHECK(render_problem(p).find("(:init (at a) (p b a))") != std::string::npos);
}

TEST_CASE("plans parse with comments and trailing cost") {
  const auto plan = parse_plan(oracle::data("fixtures/d6_plan.txt"));
  REQUIRE(plan.size() == 2);
  CHECK(plan.steps[0].str() == "(shake cocktail_a ingredient_a ingredient_b shaker_a)");
  CHECK(render_plan(plan) == "(shake cocktail_a ingredient_a ingredient_b shaker_a)\n"
                             "(pour-shaker-to-shot cocktail_a shot_a shaker_a ingredient_a ingredient_a)\n"
                             "; cost = 2 (unit cost)\n");
}

TEST_CASE("two-city travel grounds to four ordered pairs per action") {
  const auto d = parse_domain(oracle::data("fixtures/d1_domain.pddl"));
  const auto p = parse_problem(
      "(define (problem two) (:domain domaingotocity) (:objects x y - city) (:init (at x)) (:goal (at y)))", d);
  const auto task = ground_task({d, p});
  int taxi = 0, bus = 0;
  for (const auto& a : task.actions) {
    taxi += a.name == "use_taxi";
    bus += a.name == "use_bus";
  }
  CHECK(taxi == 4);
  CHECK(bus == 4);
}

TEST_CASE("fourteen-city grounding counts") {
  const auto task = ground_task(fixture("d1"));
  std::map<std::string, int> per_pred;
  for (const auto& a : task.atoms) ++per_pred[a.predicate];
  CHECK(per_pred["at"] == 14);
  CHECK(per_pred["has_bus"] == 196);
  CHECK(per_pred["has_taxi"] == 196);
  CHECK(per_pred["neighboring"] == 196);
}

TEST_CASE("grounding cap") {
  GroundingOptions tight;
  tight.max_atoms = 100;
  CHECK(code_of([&] { ground_task(fixture("d1"), tight); }) == ErrorCode::kGroundingBlowup);
  tight.max_atoms = 1'000'000;
  tight.max_actions = 10;
  CHECK(code_of([&] { ground_task(fixture("d1"), tight); }) == ErrorCode::kGroundingBlowup);
}

TEST_CASE("domain with no actions grounds to no actions") {
  const auto m = parse_model("(define (domain d) (:requirements :strips) (:predicates (p)))",
                             "(define (problem q) (:domain d) (:init (p)) (:goal (p)))");
  const auto task = ground_task(m);
  CHECK(task.actions.empty());
  CHECK(task.init.size() == 1);
}

TEST_CASE("grounding matches brute-force enumeration") {
  for (const char* tag : {"d3", "d4", "d6"}) {
    CAPTURE(tag);
    const auto m = fixture(tag);
    const auto task = ground_task(m);
    std::set<std::string> atoms;
    for (const auto& a : task.atoms) {
      atoms.insert(a.str());
      CHECK_FALSE(check_atom(m, a).has_value());
    }
    CHECK(atoms == oracle::all_atoms(m));
    std::set<std::string> actions, expected;
    for (const auto& a : task.actions) actions.insert(a.str());
    for (const auto& a : oracle::all_actions(m)) expected.insert(PlanStep{a.name, a.args}.str());
    CHECK(actions == expected);
  }
}
