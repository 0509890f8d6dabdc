#include "modelspace/grounding.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

#include "modelspace/error.hpp"

namespace modelspace {

namespace {

std::string key_of(std::string_view name, const std::vector<std::string>& args) {
  std::string key(name);
  for (const auto& a : args) {
    key += ' ';
    key += a;
  }
  return key;
}

class Grounder {
 public:
  Grounder(const Model& model, const GroundingOptions& options)
      : model_(model), options_(options), universe_(model.universe()) {}

  std::vector<GroundAtom> atoms_only() {
    ground_atoms();
    return std::move(task_.atoms);
  }

  GroundTask run() {
    ground_atoms();
    ground_actions();
    for (const auto& a : model_.problem.init) task_.init.push_back(lookup(a.predicate, a.args));
    for (const auto& a : model_.problem.goal) task_.goal.push_back(lookup(a.predicate, a.args));
    std::sort(task_.init.begin(), task_.init.end());
    std::sort(task_.goal.begin(), task_.goal.end());
    return std::move(task_);
  }

 private:
  const std::vector<std::string>& objects_of(const std::string& type) {
    auto [it, inserted] = by_type_.try_emplace(type);
    if (inserted) {
      for (const auto& [name, t] : universe_) {
        if (model_.domain.is_subtype(t, type)) it->second.push_back(name);
      }
    }
    return it->second;
  }

  // Calls fn(tuple) for every tuple in the cartesian product of `domains`.
  template <typename Fn>
  static void for_each_tuple(const std::vector<const std::vector<std::string>*>& domains, Fn&& fn) {
    std::vector<std::string> tuple(domains.size());
    std::vector<std::size_t> idx(domains.size(), 0);
    for (const auto* d : domains) {
      if (d->empty()) return;
    }
    for (std::size_t i = 0; i < domains.size(); ++i) tuple[i] = (*domains[i])[0];
    while (true) {
      fn(tuple);
      std::size_t pos = domains.size();
      while (pos > 0) {
        --pos;
        if (++idx[pos] < domains[pos]->size()) {
          tuple[pos] = (*domains[pos])[idx[pos]];
          break;
        }
        idx[pos] = 0;
        tuple[pos] = (*domains[pos])[0];
        if (pos == 0) return;
      }
      if (domains.empty()) return;
    }
  }

  static std::size_t product(const std::vector<const std::vector<std::string>*>& domains) {
    std::size_t total = 1;
    for (const auto* d : domains) {
      if (d->empty()) return 0;
      if (total > std::numeric_limits<std::size_t>::max() / d->size()) {
        return std::numeric_limits<std::size_t>::max();
      }
      total *= d->size();
    }
    return total;
  }

  void ground_atoms() {
    std::size_t total = 0;
    std::vector<std::vector<const std::vector<std::string>*>> per_pred;
    for (const auto& p : model_.domain.predicates) {
      std::vector<const std::vector<std::string>*> domains;
      for (const auto& param : p.params) domains.push_back(&objects_of(param.type));
      const std::size_t n = product(domains);
      total = (n > options_.max_atoms || total + n > options_.max_atoms) ? options_.max_atoms + 1 : total + n;
      if (total > options_.max_atoms) {
        throw Error(ErrorCode::kGroundingBlowup,
                    "more than " + std::to_string(options_.max_atoms) + " ground atoms");
      }
      per_pred.push_back(std::move(domains));
    }
    task_.atoms.reserve(total);
    for (std::size_t i = 0; i < per_pred.size(); ++i) {
      const std::string& name = model_.domain.predicates[i].name;
      for_each_tuple(per_pred[i], [&](const std::vector<std::string>& t) {
        task_.atoms.push_back({name, t});
      });
    }
    std::sort(task_.atoms.begin(), task_.atoms.end());
    task_.rebuild_index();
  }

  AtomId lookup(const std::string& predicate, const std::vector<std::string>& args) const {
    auto id = task_.find_atom({predicate, args});
    if (!id) {
      throw Error(ErrorCode::kInvalidModel, "atom " + GroundAtom{predicate, args}.str() +
                                                " is not in the grounded universe");
    }
    return *id;
  }

  void ground_actions() {
    std::size_t total = 0;
    for (const auto& schema : model_.domain.actions) {
      std::vector<const std::vector<std::string>*> domains;
      for (const auto& p : schema.parameters) domains.push_back(&objects_of(p.type));
      const std::size_t n = product(domains);
      total = (n > options_.max_actions || total + n > options_.max_actions) ? options_.max_actions + 1 : total + n;
      if (total > options_.max_actions) {
        throw Error(ErrorCode::kGroundingBlowup,
                    "more than " + std::to_string(options_.max_actions) + " ground actions");
      }
      ground_schema(schema, domains);
    }
    std::sort(task_.actions.begin(), task_.actions.end(),
              [](const GroundAction& a, const GroundAction& b) {
                return std::tie(a.name, a.args) < std::tie(b.name, b.args);
              });
    task_.rebuild_index();
  }

  void ground_schema(const ActionSchema& schema,
                     const std::vector<const std::vector<std::string>*>& domains) {
    std::unordered_map<std::string, std::size_t> slot;
    for (std::size_t i = 0; i < schema.parameters.size(); ++i) slot[schema.parameters[i].name] = i;

    // Argument resolution: parameter slot or constant, plus the type each
    // position must satisfy when the parameter type is wider.
    struct ArgRef {
      std::optional<std::size_t> slot;
      std::string constant;
      std::string required_type;  // empty when always satisfied
    };
    struct AtomTemplate {
      std::string predicate;
      std::vector<ArgRef> args;
    };
    auto compile = [&](const std::vector<LiftedAtom>& atoms) {
      std::vector<AtomTemplate> out;
      for (const auto& a : atoms) {
        const PredicateDecl* decl = model_.domain.find_predicate(a.predicate);
        AtomTemplate t{a.predicate, {}};
        for (std::size_t i = 0; i < a.args.size(); ++i) {
          ArgRef ref;
          if (auto it = slot.find(a.args[i]); it != slot.end()) {
            ref.slot = it->second;
            const std::string& ptype = schema.parameters[it->second].type;
            if (!model_.domain.is_subtype(ptype, decl->params[i].type)) {
              ref.required_type = decl->params[i].type;
            }
          } else {
            ref.constant = a.args[i];
          }
          t.args.push_back(std::move(ref));
        }
        out.push_back(std::move(t));
      }
      return out;
    };
    const auto pre = compile(schema.preconditions);
    const auto add = compile(schema.add_effects);
    const auto del = compile(schema.del_effects);

    for_each_tuple(domains, [&](const std::vector<std::string>& binding) {
      GroundAction action{schema.name, binding, {}, {}, {}};
      bool well_typed = true;
      auto instantiate = [&](const std::vector<AtomTemplate>& templates, std::vector<AtomId>& out) {
        for (const auto& t : templates) {
          std::vector<std::string> args;
          args.reserve(t.args.size());
          for (const auto& ref : t.args) {
            if (ref.slot) {
              const std::string& obj = binding[*ref.slot];
              if (!ref.required_type.empty() &&
                  !model_.domain.is_subtype(universe_.at(obj), ref.required_type)) {
                well_typed = false;
                return;
              }
              args.push_back(obj);
            } else {
              args.push_back(ref.constant);
            }
          }
          out.push_back(lookup(t.predicate, args));
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
      };
      instantiate(pre, action.pre);
      if (well_typed) instantiate(add, action.add);
      if (well_typed) instantiate(del, action.del);
      if (well_typed) task_.actions.push_back(std::move(action));
    });
  }

  const Model& model_;
  const GroundingOptions& options_;
  std::map<std::string, std::string> universe_;
  std::unordered_map<std::string, std::vector<std::string>> by_type_;
  GroundTask task_;
};

}  // namespace

std::string GroundAction::str() const { return PlanStep{name, args}.str(); }

std::optional<AtomId> GroundTask::find_atom(const GroundAtom& atom) const {
  auto it = atom_index_.find(key_of(atom.predicate, atom.args));
  if (it == atom_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ActionId> GroundTask::find_action(std::string_view name,
                                                const std::vector<std::string>& args) const {
  auto it = action_index_.find(key_of(name, args));
  if (it == action_index_.end()) return std::nullopt;
  return it->second;
}

AtomId GroundTask::add_atom(GroundAtom atom) {
  const auto id = static_cast<AtomId>(atoms.size());
  atom_index_.emplace(key_of(atom.predicate, atom.args), id);
  atoms.push_back(std::move(atom));
  return id;
}

void GroundTask::rebuild_index() {
  atom_index_.clear();
  atom_index_.reserve(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    atom_index_.emplace(key_of(atoms[i].predicate, atoms[i].args), static_cast<AtomId>(i));
  }
  action_index_.clear();
  action_index_.reserve(actions.size());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    action_index_.emplace(key_of(actions[i].name, actions[i].args), static_cast<ActionId>(i));
  }
}

GroundTask ground_task(const Model& model, const GroundingOptions& options) {
  return Grounder(model, options).run();
}

std::vector<GroundAtom> ground_atoms(const Model& model, const GroundingOptions& options) {
  return Grounder(model, options).atoms_only();
}

}  // namespace modelspace
