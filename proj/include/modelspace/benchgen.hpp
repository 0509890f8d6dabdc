#pragma once

// Benchmark generation: five domains, their reasonable-change families, and
// perturbed instances with ground truth.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "modelspace/edit_engine.hpp"
#include "modelspace/pddl.hpp"

namespace modelspace {

enum class DomainKind { kTravel, kRoomba, kBarmanSimple, kLogisticsSimple, kLogistics };

/// travel, roomba, barman-simple, logistics-simple, logistics
std::string to_string(DomainKind kind);
/// Row label used in reports: Travel, Roomba, Barman-S, Logistics-S, Logistics.
std::string display_name(DomainKind kind);
/// Accepts to_string() names; throws Error(kOutOfRange) otherwise.
DomainKind parse_domain_kind(std::string_view name);
const std::vector<DomainKind>& all_domain_kinds();
/// The four non-IPC domains.
const std::vector<DomainKind>& novel_domain_kinds();

/// `primary`: cities, grid rows, cocktails, stations, or cities (Logistics).
/// `secondary`: grid columns or locations per city; unused elsewhere.
struct SizeParams {
  int primary = 0;
  int secondary = 0;
  friend bool operator==(const SizeParams&, const SizeParams&) = default;
};

struct SizeRange {
  SizeParams min;
  SizeParams max;
};

/// Everything generate_instance accepts.
SizeRange accepted_sizes(DomainKind kind);
/// What batch generation draws from unless told otherwise.
SizeRange default_sizes(DomainKind kind);

/// Which initial-state edits count as plausible real-world changes for a
/// domain. Membership is judged against `context`, normally the perturbed
/// model the edits would be applied to.
struct ReasonableFamily {
  DomainKind domain = DomainKind::kTravel;
  Model context;

  std::string id() const;
  bool contains(const ModelEdit& edit, const EditSet& within) const;
  /// Every edit is a member. The empty set is not.
  bool contains(const EditSet& edits) const;
};

std::string family_id(DomainKind kind);

struct GeneratedModel {
  Model model;
  ReasonableFamily family;
};

/// Solvable (planner-verified) model; deterministic in (kind, size, seed).
/// Throws kOutOfRange for sizes outside accepted_sizes and kGenerationFailed
/// when resampling does not produce a solvable model.
GeneratedModel generate_instance(DomainKind kind, SizeParams size, std::uint64_t seed);

struct BenchInstance {
  std::string id;
  DomainKind domain = DomainKind::kTravel;
  SizeParams size;
  std::uint64_t seed = 0;
  int k = 0;
  Model solvable;
  Model perturbed;
  std::vector<GroundAtom> deleted_facts;
  std::vector<GroundAtom> inserted_facts;  // Roomba obstacles
  Plan target_plan;
  ReasonableFamily family;

  /// Restores the deleted facts and takes out anything inserted.
  EditSet ground_truth_repair() const;
  /// The deleted facts as adds.
  EditSet ground_truth_adds() const;
  RepairTask task(UseCase use_case) const;
};

/// Deletes k plan-supporting family facts from `m` so that the result is
/// proven unsolvable and restoring them solves it again. Roomba also inserts
/// an obstacle for every cleared path it removes. Throws kOutOfRange unless
/// 1 <= k <= 4 and kPerturbationFailed when no tried subset works.
BenchInstance perturb_unsolvable(const GeneratedModel& m, int k, std::uint64_t seed);

/// The planner's plan for inst.solvable, stored into inst. Throws
/// kInvariantViolation if it is still valid in inst.perturbed.
Plan select_target_plan(BenchInstance& inst);

/// Checks all instance invariants from scratch; returns the violations.
std::vector<std::string> verify_instance(const BenchInstance& inst);

struct BatchSpec {
  DomainKind domain = DomainKind::kTravel;
  std::size_t count = 10;
  int k_min = 1;
  int k_max = 4;
  std::uint64_t seed = 1;
  SizeRange sizes;  // defaults to default_sizes(domain) when left zero
  std::size_t jobs = 1;
};

/// `count` instances with ids `<domain>-000`, `<domain>-001`, ... and k
/// cycling through k_min..k_max. Barman-S caps k at the largest cocktail
/// count and Logistics at 3.
std::vector<BenchInstance> generate_batch(const BatchSpec& spec);

/// One directory per instance: domain.pddl, problem_solvable.pddl,
/// problem_perturbed.pddl, target_plan.txt, ground_truth.json.
void write_instance(const std::filesystem::path& dir, const BenchInstance& inst);
BenchInstance read_instance(const std::filesystem::path& dir);
/// Instance directories under `bench`, sorted by name.
std::vector<std::filesystem::path> list_instances(const std::filesystem::path& bench);

}  // namespace modelspace
