#pragma once

// Typed-STRIPS subset of PDDL: data model, reader and canonical writer.
//
// Accepted requirements are `:strips` and `:typing`. Preconditions and goals
// are conjunctions of positive atoms; effects are conjunctions of atoms and
// negated atoms. Identifiers are normalized to lowercase.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace modelspace {

inline constexpr std::string_view kRootType = "object";

struct TypedName {
  std::string name;
  std::string type{kRootType};

  friend bool operator==(const TypedName&, const TypedName&) = default;
};

struct GroundAtom {
  std::string predicate;
  std::vector<std::string> args;

  /// `(pred a b)`
  std::string str() const;

  friend auto operator<=>(const GroundAtom&, const GroundAtom&) = default;
  friend bool operator==(const GroundAtom&, const GroundAtom&) = default;
};

/// An atom inside an action schema. Arguments starting with `?` are
/// variables, anything else names a constant.
struct LiftedAtom {
  std::string predicate;
  std::vector<std::string> args;

  std::string str() const;

  friend auto operator<=>(const LiftedAtom&, const LiftedAtom&) = default;
  friend bool operator==(const LiftedAtom&, const LiftedAtom&) = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<TypedName> params;

  friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
};

struct ActionSchema {
  std::string name;
  std::vector<TypedName> parameters;
  // Sorted and duplicate-free.
  std::vector<LiftedAtom> preconditions;
  std::vector<LiftedAtom> add_effects;
  std::vector<LiftedAtom> del_effects;

  friend bool operator==(const ActionSchema&, const ActionSchema&) = default;
};

struct DomainModel {
  std::string name;
  std::vector<std::string> requirements;
  // child -> parent; `object` is implicit and has no entry.
  std::map<std::string, std::string> type_parent;
  std::map<std::string, std::string> constants;  // constant -> type
  std::vector<PredicateDecl> predicates;
  std::vector<ActionSchema> actions;

  const PredicateDecl* find_predicate(std::string_view name) const;
  const ActionSchema* find_action(std::string_view name) const;
  bool has_type(std::string_view type) const;
  /// True when `type` equals `ancestor` or inherits from it.
  bool is_subtype(std::string_view type, std::string_view ancestor) const;

  friend bool operator==(const DomainModel&, const DomainModel&) = default;
};

struct ProblemModel {
  std::string name;
  std::string domain_name;
  std::map<std::string, std::string> objects;  // object -> type
  // Sorted and duplicate-free.
  std::vector<GroundAtom> init;
  std::vector<GroundAtom> goal;

  bool init_contains(const GroundAtom& atom) const;

  friend bool operator==(const ProblemModel&, const ProblemModel&) = default;
};

/// A domain/problem pair: the unit that model-space search edits.
struct Model {
  DomainModel domain;
  ProblemModel problem;

  /// Type of a problem object or domain constant, if declared.
  std::optional<std::string> object_type(std::string_view object) const;
  /// All objects and constants, sorted by name.
  std::map<std::string, std::string> universe() const;

  friend bool operator==(const Model&, const Model&) = default;
};

struct PlanStep {
  std::string action;
  std::vector<std::string> args;

  std::string str() const;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct Plan {
  std::vector<PlanStep> steps;
  double cost = 0.0;

  std::size_t size() const { return steps.size(); }

  friend bool operator==(const Plan&, const Plan&) = default;
};

DomainModel parse_domain(std::string_view text);
ProblemModel parse_problem(std::string_view text, const DomainModel& domain);
Model parse_model(std::string_view domain_text, std::string_view problem_text);

/// VAL-style plan file: one `(action arg ...)` per line, `;` comments.
Plan parse_plan(std::string_view text);

/// Checks an atom against the model's declarations. Returns an explanation on
/// failure, nothing when the atom is well typed.
std::optional<std::string> check_atom(const Model& model,
                                      const GroundAtom& atom);

std::string render_domain(const DomainModel& domain);
std::string render_problem(const ProblemModel& problem);
std::string render_model(const Model& model);  // domain, blank line, problem
/// One step per line followed by a `; cost = N (unit cost)` trailer.
std::string render_plan(const Plan& plan);

}  // namespace modelspace
