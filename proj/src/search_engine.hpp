#pragma once

// Deferred-evaluation best-first search with duplicate detection on packed
// states. Shared by the planner and the model-space search.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "modelspace/grounding.hpp"
#include "modelspace/planner.hpp"

namespace modelspace::detail {

using NodeId = std::uint32_t;

struct SearchHooks {
  // Called on every popped goal node. Return true to stop the search.
  std::function<bool(NodeId)> on_goal;
  // Return true to close the node without generating successors.
  std::function<bool(NodeId)> skip_expansion;
  // Called right before successors of a node are generated.
  std::function<void(NodeId)> on_expand;
  std::function<bool(NodeId, ActionId)> allow_successor;
  // Checked on every newly closed node; true ends the search with status
  // kSolved and no goal node.
  std::function<bool(NodeId)> halt;
};

class SearchEngine {
 public:
  SearchEngine(const GroundTask& task, std::span<const double> costs, SearchMode mode);

  struct Result {
    SolveStatus status = SolveStatus::kBudgetExhausted;
    std::optional<NodeId> goal;
    SearchStats stats;
  };

  /// Stops at the first goal unless hooks.on_goal says otherwise. When the
  /// open list runs dry the status is kProvenUnsolvable, even if goals were
  /// seen along the way.
  Result run(const SearchBudget& budget, const SearchHooks& hooks = {});

  /// Closes states whose goal is unreachable even with delete effects
  /// ignored. Sound, so optimality and unsolvability proofs are unaffected.
  void set_dead_end_pruning(bool on) { prune_dead_ends_ = on; }

  bool holds(NodeId node, AtomId atom) const;
  std::vector<ActionId> path_to(NodeId node) const;
  double g(NodeId node) const { return g_[node]; }
  double cost(ActionId a) const { return costs_.empty() ? 1.0 : costs_[a]; }

 private:
  const std::uint64_t* state(NodeId node) const { return &pool_[std::size_t(node) * words_]; }
  std::uint64_t hash_state(const std::uint64_t* s) const;
  bool same_state(const std::uint64_t* a, const std::uint64_t* b) const;
  // Returns the existing node for the scratch state, or registers it.
  std::pair<NodeId, bool> intern(const std::vector<std::uint64_t>& s);
  void grow_table();
  bool is_goal(const std::uint64_t* s) const;
  int goal_distance(const std::uint64_t* s) const;
  bool relaxed_dead_end(const std::uint64_t* s);

  static constexpr NodeId kNone = 0xffffffffu;

  const GroundTask& task_;
  std::span<const double> costs_;
  SearchMode mode_;
  bool goal_reachable_ = true;
  bool prune_dead_ends_ = true;

  std::vector<int> bit_of_;        // atom -> fluent bit or -1
  std::vector<char> static_true_;  // for atoms with no fluent bit
  std::size_t words_ = 1;

  struct Op {
    ActionId id;
    std::vector<std::uint32_t> pre;
    std::vector<std::uint32_t> add;
    std::vector<std::uint32_t> del;
  };
  std::vector<Op> ops_;
  std::vector<std::vector<std::uint32_t>> trigger_;  // bit -> ops keyed there
  std::vector<std::uint32_t> unconditional_;         // ops without fluent pre
  std::vector<std::vector<std::uint32_t>> pre_of_;   // bit -> ops needing it
  std::vector<std::uint32_t> unmet_;                 // scratch for relaxed_dead_end
  std::vector<char> reached_;
  std::vector<std::uint32_t> frontier_;
  std::vector<std::uint32_t> goal_bits_;
  std::vector<std::uint64_t> init_;

  std::vector<std::uint64_t> pool_;
  std::vector<NodeId> parent_;
  std::vector<ActionId> via_;
  std::vector<double> g_;
  std::vector<NodeId> table_;
  std::size_t table_used_ = 0;
};

}  // namespace modelspace::detail
