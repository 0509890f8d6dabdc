#include "doctest.h"

#include <filesystem>
#include <functional>
#include <set>

#include "modelspace/benchgen.hpp"
#include "modelspace/error.hpp"
#include "modelspace/planner.hpp"
#include "support/oracles.hpp"

using namespace modelspace;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

std::set<std::string> atom_strings(const std::vector<GroundAtom>& atoms) {
  std::set<std::string> out;
  for (const auto& a : atoms) out.insert(a.str());
  return out;
}

// Small sizes keep the explicit-state oracle fast.
SizeParams smallest(DomainKind kind) { return accepted_sizes(kind).min; }

}  // namespace

TEST_CASE("domain names round-trip") {
  for (auto kind : all_domain_kinds()) CHECK(parse_domain_kind(to_string(kind)) == kind);
  CHECK(code_of([] { parse_domain_kind("blocksworld"); }) == ErrorCode::kOutOfRange);
  CHECK(novel_domain_kinds().size() == 4);
  CHECK(display_name(DomainKind::kBarmanSimple) == "Barman-S");
}

TEST_CASE("generated models are solvable according to breadth-first search") {
  for (auto kind : novel_domain_kinds()) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto g = generate_instance(kind, smallest(kind), seed);
      CAPTURE(to_string(kind));
      CHECK(oracle::shortest_plan(g.model).has_value());
    }
  }
}

TEST_CASE("generation is deterministic in kind, size and seed") {
  for (auto kind : all_domain_kinds()) {
    const auto a = generate_instance(kind, default_sizes(kind).min, 11);
    const auto b = generate_instance(kind, default_sizes(kind).min, 11);
    CHECK(a.model == b.model);
  }
  BatchSpec spec;
  spec.domain = DomainKind::kRoomba;
  spec.count = 4;
  spec.seed = 5;
  const auto x = generate_batch(spec);
  spec.jobs = 3;
  const auto y = generate_batch(spec);
  REQUIRE(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i].id == y[i].id);
    CHECK(x[i].perturbed == y[i].perturbed);
    CHECK(x[i].target_plan == y[i].target_plan);
  }
}

TEST_CASE("sizes and k outside the accepted range are rejected") {
  CHECK(code_of([] { generate_instance(DomainKind::kTravel, {2, 0}, 1); }) == ErrorCode::kOutOfRange);
  CHECK(code_of([] { generate_instance(DomainKind::kRoomba, {9, 9}, 1); }) == ErrorCode::kOutOfRange);
  const auto g = generate_instance(DomainKind::kTravel, {5, 0}, 1);
  CHECK(code_of([&] { perturb_unsolvable(g, 0, 1); }) == ErrorCode::kOutOfRange);
  CHECK(code_of([&] { perturb_unsolvable(g, 5, 1); }) == ErrorCode::kOutOfRange);
}

TEST_CASE("perturbed instances satisfy their invariants, checked independently") {
  for (auto kind : novel_domain_kinds()) {
    BatchSpec spec;
    spec.domain = kind;
    spec.count = 4;
    spec.seed = 3;
    spec.sizes = default_sizes(kind);
    if (kind == DomainKind::kBarmanSimple) spec.sizes.max.primary = 2;
    for (const auto& inst : generate_batch(spec)) {
      CAPTURE(inst.id);
      CHECK(verify_instance(inst).empty());
      CHECK(inst.deleted_facts.size() == static_cast<std::size_t>(inst.k));
      CHECK(oracle::shortest_plan(inst.solvable).has_value());
      CHECK_FALSE(oracle::shortest_plan(inst.perturbed).has_value());
      CHECK(oracle::plan_valid(inst.solvable, inst.target_plan));
      CHECK_FALSE(oracle::plan_valid(inst.perturbed, inst.target_plan));

      // The ground truth lines up with the init difference.
      const auto before = oracle::init_state(inst.solvable);
      const auto after = oracle::init_state(inst.perturbed);
      for (const auto& a : inst.deleted_facts) {
        CHECK(before.count(a.str()) == 1);
        CHECK(after.count(a.str()) == 0);
      }
      for (const auto& a : inst.inserted_facts) CHECK(after.count(a.str()) == 1);
      const Model restored = apply_edits(inst.perturbed, inst.ground_truth_repair());
      CHECK(oracle::init_state(restored) == before);
      CHECK(inst.family.contains(inst.ground_truth_repair()));
    }
  }
}

TEST_CASE("travel family: services only between neighbors") {
  const auto g = generate_instance(DomainKind::kTravel, {6, 0}, 4);
  const auto neighbors = oracle::init_state(g.model);
  for (const auto& e : build_edit_space(g.model)) {
    const auto& a = e.atom;
    bool expected = false;
    if (a.predicate == "has_bus" || a.predicate == "has_taxi") {
      expected = neighbors.count("(neighboring " + a.args[0] + " " + a.args[1] + ")") == 1;
    }
    CAPTURE(a.str());
    CHECK(g.family.contains(EditSet({e})) == expected);
  }
  CHECK_FALSE(g.family.contains(EditSet{}));
}

TEST_CASE("roomba family: clearing adjacent unwalled paths") {
  const auto g = generate_instance(DomainKind::kRoomba, {3, 3}, 2);
  const auto init = oracle::init_state(g.model);
  for (const auto& e : build_edit_space(g.model)) {
    const auto& a = e.atom;
    bool expected = false;
    if (a.predicate == "path_is_clear") {
      const auto& x = a.args[0];
      const auto& y = a.args[1];
      expected = init.count("(adjacent " + x + " " + y + ")") && !init.count("(wall_between " + x + " " + y + ")") &&
                 !init.count("(wall_between " + y + " " + x + ")");
    }
    CAPTURE(a.str());
    CHECK(g.family.contains(EditSet({e})) == expected);
  }
}

TEST_CASE("one cocktail needs a two-step plan") {
  const auto g = generate_instance(DomainKind::kBarmanSimple, {1, 0}, 1);
  CHECK(oracle::shortest_plan(g.model) == 2);
  const auto inst = perturb_unsolvable(g, 1, 1);
  CHECK(inst.target_plan.size() == 2);
  REQUIRE(inst.deleted_facts.size() == 1);
  CHECK(inst.deleted_facts[0].predicate == "clean");
}

TEST_CASE("batch ids, k cycling and the barman cap") {
  BatchSpec spec;
  spec.domain = DomainKind::kTravel;
  spec.count = 6;
  const auto travel = generate_batch(spec);
  REQUIRE(travel.size() == 6);
  CHECK(travel[0].id == "travel-000");
  CHECK(travel[5].id == "travel-005");
  std::vector<int> ks;
  for (const auto& inst : travel) ks.push_back(inst.k);
  CHECK(ks == std::vector<int>{1, 2, 3, 4, 1, 2});

  spec.domain = DomainKind::kBarmanSimple;
  spec.count = 4;
  spec.sizes = {{1, 0}, {2, 0}};
  for (const auto& inst : generate_batch(spec)) {
    CHECK(inst.k <= 2);
    CHECK(inst.size.primary >= inst.k);
  }
}

TEST_CASE("instances survive a trip through disk") {
  const auto dir = std::filesystem::temp_directory_path() / "modelspace_benchgen_test";
  std::filesystem::remove_all(dir);
  BatchSpec spec;
  spec.domain = DomainKind::kLogisticsSimple;
  spec.count = 2;
  const auto batch = generate_batch(spec);
  for (const auto& inst : batch) write_instance(dir / inst.id, inst);
  const auto dirs = list_instances(dir);
  REQUIRE(dirs.size() == 2);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const auto back = read_instance(dirs[i]);
    CHECK(back.id == batch[i].id);
    CHECK(back.k == batch[i].k);
    CHECK(back.perturbed == batch[i].perturbed);
    CHECK(back.solvable == batch[i].solvable);
    CHECK(back.target_plan.steps == batch[i].target_plan.steps);
    CHECK(atom_strings(back.deleted_facts) == atom_strings(batch[i].deleted_facts));
    CHECK(back.family.id() == batch[i].family.id());
  }
  std::filesystem::remove_all(dir);
}
