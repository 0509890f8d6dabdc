#pragma once

// Forward uniform-cost search over grounded tasks, and step-by-step plan
// validation against lifted models.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modelspace/grounding.hpp"
#include "modelspace/pddl.hpp"

namespace modelspace {

struct SearchBudget {
  std::uint64_t max_expansions = 200'000;
  double max_seconds = 30.0;
};

struct SearchStats {
  std::uint64_t expansions = 0;
  std::uint64_t generated = 0;
  double elapsed_seconds = 0.0;
};

enum class SolveStatus { kSolved, kProvenUnsolvable, kBudgetExhausted };
std::string to_string(SolveStatus status);

/// kGreedy orders the open list by unsatisfied goal count. Plans lose the
/// optimality guarantee; an exhausted closed list still proves unsolvability.
enum class SearchMode { kOptimal, kGreedy };

struct SolveVerdict {
  SolveStatus status = SolveStatus::kBudgetExhausted;
  std::vector<ActionId> actions;  // empty unless solved
  Plan plan;
  SearchStats stats;

  bool solved() const { return status == SolveStatus::kSolved; }
};

/// `costs` is indexed by ActionId; empty means unit cost. Equal-cost entries
/// pop fewest-unsatisfied-goals first (judged at the parent), then
/// first-in-first-out with successors in action order, so results are
/// deterministic.
SolveVerdict solve(const GroundTask& task, std::span<const double> costs = {},
                   const SearchBudget& budget = {},
                   SearchMode mode = SearchMode::kOptimal);

/// Grounds `model` and solves it with unit costs.
SolveVerdict solve(const Model& model, const SearchBudget& budget = {});

struct ValidationReport {
  bool valid = false;
  std::optional<std::size_t> failing_step;  // 0-based
  std::vector<GroundAtom> unmet_preconditions;
  bool goal_satisfied = false;
};

/// Simulates `plan` from the initial state. Throws Error(kUnknownAction) when
/// a step names an undeclared action or an ill-typed binding.
ValidationReport validate_plan(const Model& model, const Plan& plan);

/// Ground instance of one plan step, with the same checks as validate_plan.
struct GroundStep {
  std::vector<GroundAtom> pre;
  std::vector<GroundAtom> add;
  std::vector<GroundAtom> del;
};
GroundStep instantiate_step(const Model& model, const PlanStep& step);

}  // namespace modelspace
