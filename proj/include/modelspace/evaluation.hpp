#pragma once

// Judging edit sets, aggregating pipeline outcomes into report tables, and
// the per-instance soundness bars.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "modelspace/benchgen.hpp"
#include "modelspace/pipelines.hpp"

namespace modelspace {

struct SoundnessVerdict {
  bool sound = false;
  bool indeterminate = false;  // the planner ran out of budget; counted as not sound
};

/// Solvability of the repaired model, or validity of the target plan in it.
/// Throws kStaleEdit / kConflictingEdit when `edits` does not apply.
SoundnessVerdict judge_soundness(const RepairTask& task, const EditSet& edits,
                                 const SearchBudget& budget = {});

/// Every edit belongs to the family. The empty set counts only when the task
/// needed no repair.
bool judge_preferred(const EditSet& edits, const ReasonableFamily& family, bool repair_needed = true);

struct Tally {
  std::size_t attempted = 0;
  std::size_t sound = 0;
  std::size_t preferred = 0;
  std::size_t context_overflow = 0;
  std::size_t unparseable = 0;
  std::size_t no_solution = 0;
  std::size_t indeterminate = 0;

  void add(const PipelineOutcome& o);
  std::string sound_cell() const;      // "sound/attempted"
  std::string preferred_cell() const;  // "preferred/sound"
  friend bool operator==(const Tally&, const Tally&) = default;
};

struct ReportKey {
  UseCase use_case = UseCase::kUnsolvability;
  std::string domain;
  PipelineKind pipeline = PipelineKind::kLlmOnly;
  std::string provider;
  friend auto operator<=>(const ReportKey&, const ReportKey&) = default;
};

struct AggregateReport {
  std::map<ReportKey, Tally> cells;
  std::map<ReportKey, Tally> overall;  // domain left empty
  std::map<std::string, std::string> metadata;
};

/// Independent of record order.
AggregateReport aggregate(const std::vector<PipelineOutcome>& records,
                          std::map<std::string, std::string> metadata = {});

std::string report_json(const AggregateReport& report);
/// One table per use case: a row per domain plus Overall, a Sound and a
/// Preferred column per pipeline and provider.
std::string report_markdown(const AggregateReport& report);

struct InstanceFacts {
  std::string domain;
  int edit_size = 0;
  std::size_t plan_size = 0;
};
using InstanceIndex = std::map<std::string, InstanceFacts>;

InstanceIndex instance_index(const std::vector<BenchInstance>& instances);

struct BarDatum {
  std::string instance_id;
  std::string domain;
  PipelineKind pipeline = PipelineKind::kLlmOnly;
  UseCase use_case = UseCase::kUnsolvability;
  int edit_size = 0;
  std::size_t plan_size = 0;
  int value = -1;  // +1 sound, -1 otherwise
};

/// One datum per record, sorted by (domain, edit_size, id, use case,
/// pipeline). Throws kUnknownInstance for ids missing from the index.
std::vector<BarDatum> fig_data(const std::vector<PipelineOutcome>& records, const InstanceIndex& index);
/// Header instance_id,domain,pipeline,edit_size,plan_size,value,use_case.
std::string fig_data_csv(const std::vector<BarDatum>& data);

}  // namespace modelspace
