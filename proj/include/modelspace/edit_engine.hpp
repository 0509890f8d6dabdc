#pragma once

// Initial-state edits, the plan-executability compilation, and the
// combinatorial search (CS) over edit sets.

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "modelspace/planner.hpp"
#include "modelspace/pddl.hpp"

namespace modelspace {

enum class EditKind { kAdd, kRemove };

struct ModelEdit {
  EditKind kind = EditKind::kAdd;
  GroundAtom atom;

  /// `(+ (has_bus a b))` or `(- (has_bus a b))`
  std::string str() const;

  friend auto operator<=>(const ModelEdit&, const ModelEdit&) = default;
  friend bool operator==(const ModelEdit&, const ModelEdit&) = default;
};

ModelEdit add_edit(GroundAtom atom);
ModelEdit remove_edit(GroundAtom atom);

/// Sorted, duplicate-free set of edits. Adds sort before removes.
class EditSet {
 public:
  EditSet() = default;
  explicit EditSet(std::vector<ModelEdit> edits);

  const std::vector<ModelEdit>& edits() const { return edits_; }
  bool empty() const { return edits_.empty(); }
  std::size_t size() const { return edits_.size(); }
  bool contains(const ModelEdit& e) const;
  bool includes(const EditSet& other) const;  // superset or equal

  /// Space-separated edits; empty string for the empty set.
  std::string str() const;

  friend auto operator<=>(const EditSet&, const EditSet&) = default;
  friend bool operator==(const EditSet&, const EditSet&) = default;

 private:
  std::vector<ModelEdit> edits_;
};

/// Inverse of ModelEdit::str / EditSet::str.
ModelEdit parse_edit(std::string_view text);
EditSet parse_edit_set(std::string_view text);

enum class UseCase { kUnsolvability, kExecutability };
std::string to_string(UseCase use_case);

struct RepairTask {
  Model base;
  UseCase use_case = UseCase::kUnsolvability;
  std::optional<Plan> target_plan;  // required for kExecutability
};

struct EditSpaceOptions {
  std::optional<std::set<std::string>> allow;  // predicate names
  bool adds = true;
  bool removes = false;
};

/// Every well-typed candidate edit: adds of atoms absent from init, removals
/// of init atoms. Throws Error(kEmptySpace) when nothing qualifies.
std::vector<ModelEdit> build_edit_space(const Model& model, const EditSpaceOptions& options = {});

/// Throws kConflictingEdit when one atom is both added and removed, and
/// kStaleEdit when an add is already in init, a removal is not, or an atom
/// is ill-typed.
Model apply_edits(const Model& model, const EditSet& edits);

/// Compiles "plan is executable" into "model is solvable". The result uses
/// fresh nullary fluents step_0..step_n (suffixed on collision), one
/// parameterless action per plan step, and has goal step_n plus the original
/// goal. Objects named by the plan become domain constants.
Model compile_executability(const Model& model, const Plan& plan);

struct RankedEdit {
  ModelEdit edit;
  double cost = 1.0;
};
using RankedEdits = std::vector<RankedEdit>;

inline constexpr std::size_t kMaxRankedEdits = 20;

enum class RankOverflow { kReject, kTruncate };

/// Doubling costs 1, 2, 4, ... so that every prefix costs less than the next
/// edit alone. More than 20 edits throws kTooManyEdits unless truncating; a
/// truncation is reported through `truncated`.
RankedEdits assign_rank_costs(const std::vector<ModelEdit>& ordered,
                              RankOverflow overflow = RankOverflow::kReject,
                              bool* truncated = nullptr);
RankedEdits uniform_costs(const std::vector<ModelEdit>& edits);

struct RepairSolution {
  EditSet edits;
  Model repaired;
  double total_cost = 0.0;
  SearchStats stats;
};

enum class NoSolutionReason { kProvenInsufficient, kBudgetExhausted };
std::string to_string(NoSolutionReason reason);

struct NoSolution {
  NoSolutionReason reason = NoSolutionReason::kBudgetExhausted;
  SearchStats stats;
};

using RepairResult = std::variant<RepairSolution, NoSolution>;

/// Cheapest edit set drawn from `space` that satisfies the task's objective.
/// The result is re-verified before return; a failed check throws
/// kInvariantViolation.
RepairResult repair_min_cost(const RepairTask& task, const RankedEdits& space,
                             const SearchBudget& budget);

struct Enumeration {
  std::vector<EditSet> options;  // (size, lexicographic), at most max_options
  SearchStats stats;
  std::optional<NoSolutionReason> failure;  // set iff options is empty
};

/// Runs the unit-cost CS past its first goal, keeping every minimal edit set
/// it reaches before the budget runs out.
Enumeration enumerate_solutions(const RepairTask& task, const std::vector<ModelEdit>& space,
                                const SearchBudget& budget, std::size_t max_options = 20);

/// 5,000 expansions for unsolvability, 10,000 for executability, two hours.
SearchBudget enumeration_budget(UseCase use_case);

struct ObjectiveCheck {
  bool holds = false;
  bool indeterminate = false;  // planner ran out of budget
};

/// Solvability of `candidate`, or validity of the task's target plan in it.
ObjectiveCheck check_objective(const RepairTask& task, const Model& candidate,
                               const SearchBudget& budget = {});

}  // namespace modelspace
