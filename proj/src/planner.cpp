#include "modelspace/planner.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "modelspace/error.hpp"
#include "search_engine.hpp"

namespace modelspace {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kSolved: return "Solved";
    case SolveStatus::kProvenUnsolvable: return "ProvenUnsolvable";
    case SolveStatus::kBudgetExhausted: return "BudgetExhausted";
  }
  return "?";
}

SolveVerdict solve(const GroundTask& task, std::span<const double> costs,
                   const SearchBudget& budget, SearchMode mode) {
  detail::SearchEngine engine(task, costs, mode);
  const auto result = engine.run(budget);
  SolveVerdict verdict;
  verdict.status = result.status;
  verdict.stats = result.stats;
  if (result.goal) {
    verdict.actions = engine.path_to(*result.goal);
    for (ActionId id : verdict.actions) {
      const auto& a = task.actions[id];
      verdict.plan.steps.push_back({a.name, a.args});
      verdict.plan.cost += engine.cost(id);
    }
  }
  return verdict;
}

SolveVerdict solve(const Model& model, const SearchBudget& budget) {
  return solve(ground_task(model), {}, budget);
}

GroundStep instantiate_step(const Model& model, const PlanStep& step) {
  const ActionSchema* schema = model.domain.find_action(step.action);
  if (schema == nullptr) {
    throw Error(ErrorCode::kUnknownAction, "no action named '" + step.action + "'");
  }
  if (schema->parameters.size() != step.args.size()) {
    throw Error(ErrorCode::kUnknownAction,
                step.str() + ": expected " + std::to_string(schema->parameters.size()) +
                    " arguments");
  }
  std::unordered_map<std::string, std::string> binding;
  for (std::size_t i = 0; i < step.args.size(); ++i) {
    const auto type = model.object_type(step.args[i]);
    if (!type) throw Error(ErrorCode::kUnknownAction, step.str() + ": unknown object '" + step.args[i] + "'");
    if (!model.domain.is_subtype(*type, schema->parameters[i].type)) {
      throw Error(ErrorCode::kUnknownAction, step.str() + ": '" + step.args[i] + "' is not a " +
                                                 schema->parameters[i].type);
    }
    binding[schema->parameters[i].name] = step.args[i];
  }
  auto ground = [&](const std::vector<LiftedAtom>& atoms) {
    std::vector<GroundAtom> out;
    for (const auto& a : atoms) {
      GroundAtom g{a.predicate, {}};
      for (const auto& arg : a.args) {
        auto it = binding.find(arg);
        g.args.push_back(it == binding.end() ? arg : it->second);
      }
      if (auto problem = check_atom(model, g)) {
        throw Error(ErrorCode::kUnknownAction, step.str() + ": " + *problem);
      }
      out.push_back(std::move(g));
    }
    return out;
  };
  return {ground(schema->preconditions), ground(schema->add_effects), ground(schema->del_effects)};
}

ValidationReport validate_plan(const Model& model, const Plan& plan) {
  ValidationReport report;
  std::set<GroundAtom> state(model.problem.init.begin(), model.problem.init.end());
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const GroundStep step = instantiate_step(model, plan.steps[i]);
    for (const auto& p : step.pre) {
      if (!state.count(p)) report.unmet_preconditions.push_back(p);
    }
    if (!report.unmet_preconditions.empty()) {
      report.failing_step = i;
      // Later steps are still checked for well-formedness.
      for (std::size_t j = i + 1; j < plan.steps.size(); ++j) instantiate_step(model, plan.steps[j]);
      return report;
    }
    for (const auto& d : step.del) state.erase(d);
    for (const auto& a : step.add) state.insert(a);
  }
  report.goal_satisfied = std::all_of(model.problem.goal.begin(), model.problem.goal.end(),
                                      [&](const GroundAtom& g) { return state.count(g) > 0; });
  report.valid = report.goal_satisfied;
  return report;
}

}  // namespace modelspace
