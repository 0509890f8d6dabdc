// Model-space search: initial-state edits become actions of an "editing"
// phase that precedes the original task, and a single uniform-cost search
// over the combined task finds edit sets.

#include <algorithm>
#include <map>

#include "modelspace/edit_engine.hpp"
#include "modelspace/error.hpp"
#include "search_engine.hpp"

namespace modelspace {

namespace {

struct CompiledSpace {
  Model target;  // base, or its executability compilation
  GroundTask task;
  std::vector<double> costs;
  std::vector<ModelEdit> edits;  // kept edits, by index
  std::vector<AtomId> pending;   // pending_i per kept edit
  std::size_t original_actions = 0;
  ActionId first_apply = 0;
  AtomId executing = 0;
  SearchStats precheck;
  bool insufficient = false;  // even all edits together cannot help
};

void accumulate(SearchStats& into, const SearchStats& s) {
  into.expansions += s.expansions;
  into.generated += s.generated;
  into.elapsed_seconds += s.elapsed_seconds;
}

// Atoms that can matter for reaching the goal: the goal itself and,
// transitively, preconditions of actions adding a relevant atom.
std::vector<char> relevant_atoms(const GroundTask& task) {
  std::vector<char> relevant(task.atoms.size(), 0);
  for (AtomId g : task.goal) relevant[g] = 1;
  std::vector<char> used(task.actions.size(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < task.actions.size(); ++i) {
      if (used[i]) continue;
      const auto& a = task.actions[i];
      if (std::none_of(a.add.begin(), a.add.end(), [&](AtomId x) { return relevant[x] != 0; })) continue;
      used[i] = 1;
      changed = true;
      for (AtomId p : a.pre) relevant[p] = 1;
    }
  }
  return relevant;
}

CompiledSpace compile_space(const RepairTask& t, const RankedEdits& space, const SearchBudget& budget) {
  CompiledSpace cs;
  if (t.use_case == UseCase::kExecutability) {
    if (!t.target_plan) throw Error(ErrorCode::kInvalidModel, "executability task without a plan");
    cs.target = compile_executability(t.base, *t.target_plan);
  } else {
    cs.target = t.base;
  }
  cs.task = ground_task(cs.target);
  GroundTask& task = cs.task;
  cs.original_actions = task.actions.size();

  // Removals never enable anything under positive preconditions, and adds
  // of irrelevant atoms never help, so neither can be part of a minimal
  // repair.
  const auto relevant = relevant_atoms(task);
  std::vector<char> in_init(task.atoms.size(), 0);
  for (AtomId a : task.init) in_init[a] = 1;
  std::map<AtomId, std::size_t> seen;
  std::vector<AtomId> targets;
  std::vector<double> edit_costs;
  for (const auto& [edit, cost] : space) {
    if (edit.kind != EditKind::kAdd) continue;
    const auto id = task.find_atom(edit.atom);
    if (!id || in_init[*id] || !relevant[*id]) continue;
    if (auto it = seen.find(*id); it != seen.end()) {
      edit_costs[it->second] = std::min(edit_costs[it->second], cost);
      continue;
    }
    seen[*id] = cs.edits.size();
    cs.edits.push_back(edit);
    targets.push_back(*id);
    edit_costs.push_back(cost);
  }

  {
    GroundTask everything = task;
    for (AtomId a : targets) everything.init.push_back(a);
    std::sort(everything.init.begin(), everything.init.end());
    const auto verdict = solve(everything, {}, budget);
    accumulate(cs.precheck, verdict.stats);
    cs.insufficient = verdict.status == SolveStatus::kProvenUnsolvable;
  }

  const AtomId editing = task.add_atom({"__editing", {}});
  cs.executing = task.add_atom({"__executing", {}});
  for (std::size_t i = 0; i < cs.edits.size(); ++i) {
    cs.pending.push_back(task.add_atom({"__pending", {std::to_string(i)}}));
  }
  cs.costs.assign(cs.original_actions, 0.0);
  for (auto& a : task.actions) a.pre.push_back(cs.executing);
  cs.first_apply = static_cast<ActionId>(task.actions.size());
  for (std::size_t i = 0; i < cs.edits.size(); ++i) {
    task.actions.push_back({"__apply", {std::to_string(i)}, {editing, cs.pending[i]}, {targets[i]}, {cs.pending[i]}});
    cs.costs.push_back(edit_costs[i]);
  }
  task.actions.push_back({"__end_editing", {}, {editing}, {cs.executing}, {editing}});
  cs.costs.push_back(0.0);
  task.init.push_back(editing);
  for (AtomId p : cs.pending) task.init.push_back(p);
  task.goal.push_back(cs.executing);
  return cs;
}

class EditSearch {
 public:
  EditSearch(const CompiledSpace& cs) : cs_(cs), engine_(cs.task, cs.costs, SearchMode::kOptimal) {
    hooks_.on_expand = [this](detail::NodeId node) {
      max_applied_ = -1;
      for (std::size_t i = cs_.pending.size(); i-- > 0;) {
        if (!engine_.holds(node, cs_.pending[i])) {
          max_applied_ = static_cast<long>(i);
          break;
        }
      }
    };
    // Edits are applied in increasing index order only.
    hooks_.allow_successor = [this](detail::NodeId, ActionId a) {
      if (a < cs_.first_apply || a >= cs_.first_apply + cs_.edits.size()) return true;
      return static_cast<long>(a - cs_.first_apply) > max_applied_;
    };
  }

  std::vector<std::uint32_t> applied(detail::NodeId node) const {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < cs_.pending.size(); ++i) {
      if (!engine_.holds(node, cs_.pending[i])) out.push_back(static_cast<std::uint32_t>(i));
    }
    return out;
  }

  EditSet edit_set(const std::vector<std::uint32_t>& indices) const {
    std::vector<ModelEdit> edits;
    for (auto i : indices) edits.push_back(cs_.edits[i]);
    return EditSet(std::move(edits));
  }

  // The original-task part of the path to a goal node, as a plan.
  Plan witness(detail::NodeId node) const {
    Plan p;
    for (ActionId id : engine_.path_to(node)) {
      if (id >= cs_.original_actions) continue;
      const auto& a = cs_.task.actions[id];
      p.steps.push_back({a.name, a.args});
    }
    p.cost = static_cast<double>(p.steps.size());
    return p;
  }

  detail::SearchHooks& hooks() { return hooks_; }
  detail::SearchEngine& engine() { return engine_; }

 private:
  const CompiledSpace& cs_;
  detail::SearchEngine engine_;
  detail::SearchHooks hooks_;
  long max_applied_ = -1;
};

// Verifies a found edit set independently of the search; `witness` is a plan
// for the repaired model in the unsolvability case.
Model verified_repair(const RepairTask& t, const EditSet& edits, const Plan& witness) {
  Model repaired = apply_edits(t.base, edits);
  const Plan& plan = t.use_case == UseCase::kExecutability ? *t.target_plan : witness;
  if (!validate_plan(repaired, plan).valid) {
    throw Error(ErrorCode::kInvariantViolation,
                "edit set {" + edits.str() + "} failed independent verification");
  }
  return repaired;
}

}  // namespace

RepairResult repair_min_cost(const RepairTask& task, const RankedEdits& space,
                             const SearchBudget& budget) {
  const CompiledSpace cs = compile_space(task, space, budget);
  if (cs.insufficient) return NoSolution{NoSolutionReason::kProvenInsufficient, cs.precheck};

  EditSearch search(cs);
  const auto result = search.engine().run(budget, search.hooks());
  SearchStats stats = result.stats;
  accumulate(stats, cs.precheck);
  if (!result.goal) {
    return NoSolution{result.status == SolveStatus::kProvenUnsolvable
                          ? NoSolutionReason::kProvenInsufficient
                          : NoSolutionReason::kBudgetExhausted,
                      stats};
  }
  const EditSet edits = search.edit_set(search.applied(*result.goal));
  RepairSolution solution;
  solution.repaired = verified_repair(task, edits, search.witness(*result.goal));
  solution.edits = edits;
  solution.total_cost = search.engine().g(*result.goal);
  solution.stats = stats;
  return solution;
}

Enumeration enumerate_solutions(const RepairTask& task, const std::vector<ModelEdit>& space,
                                const SearchBudget& budget, std::size_t max_options) {
  Enumeration out;
  const CompiledSpace cs = compile_space(task, uniform_costs(space), budget);
  out.stats = cs.precheck;
  if (cs.insufficient) {
    out.failure = NoSolutionReason::kProvenInsufficient;
    return out;
  }

  EditSearch search(cs);
  std::vector<std::vector<std::uint32_t>> found;
  std::size_t largest = 0;
  auto covers_found = [&](const std::vector<std::uint32_t>& s) {
    return std::any_of(found.begin(), found.end(), [&](const auto& f) {
      return std::includes(s.begin(), s.end(), f.begin(), f.end());
    });
  };
  auto& hooks = search.hooks();
  hooks.on_goal = [&](detail::NodeId node) {
    auto s = search.applied(node);
    if (covers_found(s)) return false;
    verified_repair(task, search.edit_set(s), search.witness(node));
    largest = std::max(largest, s.size());
    found.push_back(std::move(s));
    return false;
  };
  hooks.skip_expansion = [&](detail::NodeId node) { return covers_found(search.applied(node)); };
  // With unit edit costs g is the edit count, so once enough options exist
  // nothing found later can sort ahead of them.
  hooks.halt = [&](detail::NodeId node) {
    return found.size() >= max_options && search.engine().g(node) > static_cast<double>(largest);
  };

  const auto result = search.engine().run(budget, hooks);
  accumulate(out.stats, result.stats);
  for (const auto& f : found) out.options.push_back(search.edit_set(f));
  std::sort(out.options.begin(), out.options.end(), [](const EditSet& a, const EditSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  if (out.options.size() > max_options) out.options.resize(max_options);
  if (out.options.empty()) {
    out.failure = result.status == SolveStatus::kProvenUnsolvable ? NoSolutionReason::kProvenInsufficient
                                                                  : NoSolutionReason::kBudgetExhausted;
  }
  return out;
}

}  // namespace modelspace
