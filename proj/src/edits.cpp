#include <algorithm>
#include <cmath>
#include <set>

#include "modelspace/edit_engine.hpp"
#include "modelspace/error.hpp"
#include "modelspace/grounding.hpp"
#include "sexpr.hpp"

namespace modelspace {

std::string ModelEdit::str() const {
  return std::string(kind == EditKind::kAdd ? "(+ " : "(- ") + atom.str() + ")";
}

ModelEdit add_edit(GroundAtom atom) { return {EditKind::kAdd, std::move(atom)}; }
ModelEdit remove_edit(GroundAtom atom) { return {EditKind::kRemove, std::move(atom)}; }

EditSet::EditSet(std::vector<ModelEdit> edits) : edits_(std::move(edits)) {
  std::sort(edits_.begin(), edits_.end());
  edits_.erase(std::unique(edits_.begin(), edits_.end()), edits_.end());
}

bool EditSet::contains(const ModelEdit& e) const {
  return std::binary_search(edits_.begin(), edits_.end(), e);
}

bool EditSet::includes(const EditSet& other) const {
  return std::includes(edits_.begin(), edits_.end(), other.edits_.begin(), other.edits_.end());
}

std::string EditSet::str() const {
  std::string out;
  for (const auto& e : edits_) {
    if (!out.empty()) out += ' ';
    out += e.str();
  }
  return out;
}

namespace {

ModelEdit edit_from_sexpr(const detail::SExpr& e) {
  if (!e.is_list || e.items.size() != 2 || e.items[0].is_list ||
      (e.items[0].token != "+" && e.items[0].token != "-") || !e.items[1].is_list) {
    throw ParseError(ErrorCode::kSyntaxError, "expected (+ (atom)) or (- (atom))", e.line,
                     e.column, e.is_list ? std::string(e.head()) : e.token);
  }
  const auto& atom = e.items[1];
  GroundAtom g;
  for (std::size_t i = 0; i < atom.items.size(); ++i) {
    if (atom.items[i].is_list) {
      throw ParseError(ErrorCode::kSyntaxError, "nested list in atom", atom.line, atom.column, "(");
    }
    if (i == 0) {
      g.predicate = atom.items[i].token;
    } else {
      g.args.push_back(atom.items[i].token);
    }
  }
  if (g.predicate.empty()) {
    throw ParseError(ErrorCode::kSyntaxError, "empty atom", atom.line, atom.column, "()");
  }
  return {e.items[0].token == "+" ? EditKind::kAdd : EditKind::kRemove, std::move(g)};
}

}  // namespace

ModelEdit parse_edit(std::string_view text) {
  const auto exprs = detail::read_sexprs(text);
  if (exprs.size() != 1) throw Error(ErrorCode::kSyntaxError, "expected exactly one edit");
  return edit_from_sexpr(exprs.front());
}

EditSet parse_edit_set(std::string_view text) {
  std::vector<ModelEdit> edits;
  for (const auto& e : detail::read_sexprs(text)) edits.push_back(edit_from_sexpr(e));
  return EditSet(std::move(edits));
}

std::string to_string(UseCase use_case) {
  return use_case == UseCase::kUnsolvability ? "unsolvability" : "executability";
}

std::string to_string(NoSolutionReason reason) {
  return reason == NoSolutionReason::kProvenInsufficient ? "ProvenInsufficient" : "BudgetExhausted";
}

std::vector<ModelEdit> build_edit_space(const Model& model, const EditSpaceOptions& options) {
  auto allowed = [&](const GroundAtom& a) {
    return !options.allow || options.allow->count(a.predicate) > 0;
  };
  std::vector<ModelEdit> out;
  if (options.adds) {
    for (auto& atom : ground_atoms(model)) {
      if (allowed(atom) && !model.problem.init_contains(atom)) out.push_back(add_edit(std::move(atom)));
    }
  }
  if (options.removes) {
    for (const auto& atom : model.problem.init) {
      if (allowed(atom)) out.push_back(remove_edit(atom));
    }
  }
  if (out.empty()) throw Error(ErrorCode::kEmptySpace, "no candidate edits for this model");
  std::sort(out.begin(), out.end());
  return out;
}

Model apply_edits(const Model& model, const EditSet& edits) {
  std::set<GroundAtom> added;
  std::set<GroundAtom> removed;
  for (const auto& e : edits.edits()) {
    (e.kind == EditKind::kAdd ? added : removed).insert(e.atom);
  }
  for (const auto& a : added) {
    if (removed.count(a)) {
      throw Error(ErrorCode::kConflictingEdit, a.str() + " is both added and removed");
    }
  }
  for (const auto& e : edits.edits()) {
    if (auto problem = check_atom(model, e.atom)) {
      throw Error(ErrorCode::kStaleEdit, e.str() + ": " + *problem);
    }
    const bool present = model.problem.init_contains(e.atom);
    if (e.kind == EditKind::kAdd && present) {
      throw Error(ErrorCode::kStaleEdit, e.str() + ": atom is already in init");
    }
    if (e.kind == EditKind::kRemove && !present) {
      throw Error(ErrorCode::kStaleEdit, e.str() + ": atom is not in init");
    }
  }
  Model out = model;
  std::vector<GroundAtom> init;
  for (const auto& a : model.problem.init) {
    if (!removed.count(a)) init.push_back(a);
  }
  init.insert(init.end(), added.begin(), added.end());
  std::sort(init.begin(), init.end());
  out.problem.init = std::move(init);
  return out;
}

Model compile_executability(const Model& model, const Plan& plan) {
  const std::size_t n = plan.steps.size();
  std::vector<GroundStep> steps;
  steps.reserve(n);
  for (const auto& s : plan.steps) steps.push_back(instantiate_step(model, s));

  auto fluent_name = [](const std::string& prefix, std::size_t i) {
    return prefix + "_" + std::to_string(i);
  };
  std::string prefix = "step";
  for (int attempt = 0;; ++attempt) {
    bool clash = false;
    for (std::size_t i = 0; i <= n && !clash; ++i) {
      clash = model.domain.find_predicate(fluent_name(prefix, i)) != nullptr;
    }
    if (!clash) break;
    if (attempt == 64) {
      throw Error(ErrorCode::kNameCollision, "no free name for step fluents");
    }
    prefix += "_x";
  }

  Model out = model;
  DomainModel& dom = out.domain;
  dom.actions.clear();
  for (std::size_t i = 0; i <= n; ++i) dom.predicates.push_back({fluent_name(prefix, i), {}});

  auto lifted = [](const std::vector<GroundAtom>& atoms) {
    std::vector<LiftedAtom> v;
    for (const auto& a : atoms) v.push_back({a.predicate, a.args});
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = steps[i];
    ActionSchema a;
    a.name = "do_" + std::to_string(i) + "_" + plan.steps[i].action;
    a.preconditions = lifted(s.pre);
    a.preconditions.push_back({fluent_name(prefix, i), {}});
    a.add_effects = lifted(s.add);
    a.add_effects.push_back({fluent_name(prefix, i + 1), {}});
    std::vector<GroundAtom> del;
    for (const auto& d : s.del) {
      if (std::find(s.add.begin(), s.add.end(), d) == s.add.end()) del.push_back(d);
    }
    a.del_effects = lifted(del);
    a.del_effects.push_back({fluent_name(prefix, i), {}});
    for (auto* v : {&a.preconditions, &a.add_effects, &a.del_effects}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    dom.actions.push_back(std::move(a));
  }

  // Parameterless actions can only mention constants.
  for (const auto& s : plan.steps) {
    for (const auto& arg : s.args) {
      auto it = out.problem.objects.find(arg);
      if (it != out.problem.objects.end()) {
        dom.constants[arg] = it->second;
        out.problem.objects.erase(it);
      }
    }
  }

  out.problem.init.push_back({fluent_name(prefix, 0), {}});
  std::sort(out.problem.init.begin(), out.problem.init.end());
  out.problem.goal.push_back({fluent_name(prefix, n), {}});
  std::sort(out.problem.goal.begin(), out.problem.goal.end());
  return out;
}

RankedEdits assign_rank_costs(const std::vector<ModelEdit>& ordered, RankOverflow overflow,
                              bool* truncated) {
  if (truncated != nullptr) *truncated = false;
  if (ordered.empty()) throw Error(ErrorCode::kEmptySpace, "no edits to rank");
  std::size_t count = ordered.size();
  if (count > kMaxRankedEdits) {
    if (overflow == RankOverflow::kReject) {
      throw Error(ErrorCode::kTooManyEdits, std::to_string(count) + " edits exceed the cap of " +
                                                std::to_string(kMaxRankedEdits));
    }
    count = kMaxRankedEdits;
    if (truncated != nullptr) *truncated = true;
  }
  RankedEdits out;
  for (std::size_t i = 0; i < count; ++i) out.push_back({ordered[i], std::ldexp(1.0, static_cast<int>(i))});
  return out;
}

RankedEdits uniform_costs(const std::vector<ModelEdit>& edits) {
  RankedEdits out;
  for (const auto& e : edits) out.push_back({e, 1.0});
  return out;
}

SearchBudget enumeration_budget(UseCase use_case) {
  return {use_case == UseCase::kUnsolvability ? 5'000u : 10'000u, 7200.0};
}

ObjectiveCheck check_objective(const RepairTask& task, const Model& candidate,
                               const SearchBudget& budget) {
  if (task.use_case == UseCase::kExecutability) {
    if (!task.target_plan) throw Error(ErrorCode::kInvalidModel, "executability task without a plan");
    return {validate_plan(candidate, *task.target_plan).valid, false};
  }
  const auto verdict = solve(candidate, budget);
  return {verdict.solved(), verdict.status == SolveStatus::kBudgetExhausted};
}

}  // namespace modelspace
