#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "modelspace/pddl.hpp"

namespace modelspace {

using AtomId = std::uint32_t;
using ActionId = std::uint32_t;

struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  // Sorted atom indices.
  std::vector<AtomId> pre;
  std::vector<AtomId> add;
  std::vector<AtomId> del;

  std::string str() const;
};

/// Propositional view of a model: every well-typed ground atom and every
/// type-consistent instantiation of every schema.
class GroundTask {
 public:
  std::vector<GroundAtom> atoms;      // sorted
  std::vector<GroundAction> actions;  // sorted by (name, args)
  std::vector<AtomId> init;           // sorted
  std::vector<AtomId> goal;           // sorted

  std::optional<AtomId> find_atom(const GroundAtom& atom) const;
  std::optional<ActionId> find_action(std::string_view name,
                                      const std::vector<std::string>& args) const;

  /// Appends a fresh atom; used by internal compilations. Does not keep
  /// `atoms` sorted.
  AtomId add_atom(GroundAtom atom);
  void rebuild_index();

 private:
  std::unordered_map<std::string, AtomId> atom_index_;
  std::unordered_map<std::string, ActionId> action_index_;
};

struct GroundingOptions {
  std::size_t max_atoms = 1'000'000;
  std::size_t max_actions = 1'000'000;
};

/// Throws Error(kGroundingBlowup) when either universe exceeds its cap.
GroundTask ground_task(const Model& model, const GroundingOptions& options = {});

/// Just the sorted atom universe, without instantiating actions.
std::vector<GroundAtom> ground_atoms(const Model& model, const GroundingOptions& options = {});

}  // namespace modelspace
