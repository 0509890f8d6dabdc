#include <algorithm>
#include <cmath>
#include <sstream>

#include "modelspace/pddl.hpp"

namespace modelspace {

namespace {

// Consecutive names sharing a type are grouped: `?x ?y - city ?z - door`.
std::string typed_list(const std::vector<TypedName>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ' ';
    out += names[i].name;
    if (i + 1 == names.size() || names[i + 1].type != names[i].type) {
      out += " - ";
      out += names[i].type;
    }
  }
  return out;
}

std::vector<TypedName> grouped_by_type(const std::map<std::string, std::string>& objects) {
  std::vector<TypedName> out;
  for (const auto& [name, type] : objects) out.push_back({name, type});
  std::stable_sort(out.begin(), out.end(),
                   [](const TypedName& a, const TypedName& b) { return a.type < b.type; });
  return out;
}

template <typename Atom>
std::string conjunction(const std::vector<Atom>& atoms) {
  if (atoms.empty()) return "()";
  std::string out = "(and";
  for (const auto& a : atoms) {
    out += ' ';
    out += a.str();
  }
  out += ')';
  return out;
}

}  // namespace

std::string render_domain(const DomainModel& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : d.requirements) os << ' ' << r;
    os << ")\n";
  }
  if (!d.type_parent.empty()) {
    std::vector<TypedName> types;
    for (const auto& [child, parent] : d.type_parent) types.push_back({child, parent});
    std::stable_sort(types.begin(), types.end(),
                     [](const TypedName& a, const TypedName& b) { return a.type < b.type; });
    os << "  (:types " << typed_list(types) << ")\n";
  }
  if (!d.constants.empty()) {
    os << "  (:constants " << typed_list(grouped_by_type(d.constants)) << ")\n";
  }
  os << "  (:predicates\n";
  for (const auto& p : d.predicates) {
    os << "    (" << p.name;
    if (!p.params.empty()) os << ' ' << typed_list(p.params);
    os << ")\n";
  }
  os << "  )\n";
  for (const auto& a : d.actions) {
    os << "  (:action " << a.name << "\n";
    os << "    :parameters (" << typed_list(a.parameters) << ")\n";
    os << "    :precondition " << conjunction(a.preconditions) << "\n";
    std::string effect;
    if (a.add_effects.empty() && a.del_effects.empty()) {
      effect = "()";
    } else {
      effect = "(and";
      for (const auto& e : a.add_effects) effect += " " + e.str();
      for (const auto& e : a.del_effects) effect += " (not " + e.str() + ")";
      effect += ")";
    }
    os << "    :effect " << effect << "\n";
    os << "  )\n";
  }
  os << ")\n";
  return os.str();
}

std::string render_problem(const ProblemModel& p) {
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n";
  os << "  (:domain " << p.domain_name << ")\n";
  os << "  (:objects";
  if (!p.objects.empty()) os << ' ' << typed_list(grouped_by_type(p.objects));
  os << ")\n";
  os << "  (:init";
  for (const auto& a : p.init) os << ' ' << a.str();
  os << ")\n";
  os << "  (:goal (and";
  for (const auto& a : p.goal) os << ' ' << a.str();
  os << "))\n";
  os << ")\n";
  return os.str();
}

std::string render_model(const Model& m) {
  return render_domain(m.domain) + "\n" + render_problem(m.problem);
}

std::string render_plan(const Plan& plan) {
  std::string out;
  for (const auto& s : plan.steps) {
    out += s.str();
    out += '\n';
  }
  std::ostringstream cost;
  if (std::floor(plan.cost) == plan.cost) {
    cost << static_cast<long long>(plan.cost);
  } else {
    cost << plan.cost;
  }
  out += "; cost = " + cost.str() + " (unit cost)\n";
  return out;
}

}  // namespace modelspace
