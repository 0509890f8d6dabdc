#include "modelspace/evaluation.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "modelspace/error.hpp"

namespace modelspace {

namespace {

std::string ratio(std::size_t a, std::size_t b) { return std::to_string(a) + "/" + std::to_string(b); }

// Known domains in table order, anything else after them by name.
int domain_rank(const std::string& domain) {
  const auto& kinds = all_domain_kinds();
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (to_string(kinds[i]) == domain) return static_cast<int>(i);
  }
  return static_cast<int>(kinds.size());
}

std::string domain_label(const std::string& domain) {
  for (auto kind : all_domain_kinds()) {
    if (to_string(kind) == domain) return display_name(kind);
  }
  return domain;
}

nlohmann::ordered_json tally_json(const Tally& t) {
  return {{"sound", t.sound_cell()},
          {"preferred", t.preferred_cell()},
          {"attempted", t.attempted},
          {"sound_count", t.sound},
          {"preferred_count", t.preferred},
          {"context_overflow", t.context_overflow},
          {"unparseable", t.unparseable},
          {"no_solution", t.no_solution},
          {"indeterminate", t.indeterminate}};
}

}  // namespace

SoundnessVerdict judge_soundness(const RepairTask& task, const EditSet& edits, const SearchBudget& budget) {
  const Model repaired = apply_edits(task.base, edits);
  const auto check = check_objective(task, repaired, budget);
  return {check.holds, check.indeterminate};
}

bool judge_preferred(const EditSet& edits, const ReasonableFamily& family, bool repair_needed) {
  if (edits.empty()) return !repair_needed;
  return family.contains(edits);
}

void Tally::add(const PipelineOutcome& o) {
  ++attempted;
  if (o.sound) ++sound;
  if (o.sound && o.preferred) ++preferred;
  if (o.indeterminate) ++indeterminate;
  switch (o.failure) {
    case FailureKind::kContextOverflow: ++context_overflow; break;
    case FailureKind::kUnparseableResponse: ++unparseable; break;
    case FailureKind::kNoSolution: ++no_solution; break;
    default: break;
  }
}

std::string Tally::sound_cell() const { return ratio(sound, attempted); }
std::string Tally::preferred_cell() const { return ratio(preferred, sound); }

AggregateReport aggregate(const std::vector<PipelineOutcome>& records, std::map<std::string, std::string> metadata) {
  AggregateReport report;
  report.metadata = std::move(metadata);
  for (const auto& o : records) {
    if (o.preferred && !o.sound) throw Error(ErrorCode::kSchemaError, o.instance_id + ": preferred but not sound");
    report.cells[{o.use_case, o.domain, o.pipeline, o.provider}].add(o);
    report.overall[{o.use_case, "", o.pipeline, o.provider}].add(o);
  }
  return report;
}

std::string report_json(const AggregateReport& report) {
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.metadata) j["metadata"][k] = v;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& [key, tally] : report.cells) {
    nlohmann::ordered_json row = {{"use_case", to_string(key.use_case)},
                                  {"domain", key.domain},
                                  {"pipeline", to_string(key.pipeline)},
                                  {"provider", key.provider}};
    row.update(tally_json(tally));
    rows.push_back(row);
  }
  j["cells"] = rows;
  auto overall = nlohmann::ordered_json::array();
  for (const auto& [key, tally] : report.overall) {
    nlohmann::ordered_json row = {{"use_case", to_string(key.use_case)},
                                  {"pipeline", to_string(key.pipeline)},
                                  {"provider", key.provider}};
    row.update(tally_json(tally));
    overall.push_back(row);
  }
  j["overall"] = overall;
  return j.dump(2) + "\n";
}

std::string report_markdown(const AggregateReport& report) {
  std::ostringstream md;
  md << "# Repair results\n";
  if (!report.metadata.empty()) {
    md << "\n";
    for (const auto& [k, v] : report.metadata) md << "- " << k << ": " << v << "\n";
  }
  for (auto use_case : {UseCase::kUnsolvability, UseCase::kExecutability}) {
    std::set<std::pair<PipelineKind, std::string>> columns;
    std::set<std::pair<int, std::string>> domains;
    for (const auto& [key, tally] : report.cells) {
      if (key.use_case != use_case) continue;
      columns.insert({key.pipeline, key.provider});
      domains.insert({domain_rank(key.domain), key.domain});
    }
    if (columns.empty()) continue;
    md << "\n## " << (use_case == UseCase::kUnsolvability ? "Unsolvability" : "Executability") << "\n\n";
    md << "| Domain |";
    for (const auto& [pipeline, provider] : columns) {
      md << " " << display_name(pipeline) << " (" << provider << ") Sound | " << display_name(pipeline) << " ("
         << provider << ") Preferred |";
    }
    md << "\n|---|";
    for (std::size_t i = 0; i < columns.size(); ++i) md << "---|---|";
    md << "\n";
    auto row = [&](const std::string& label, const std::map<ReportKey, Tally>& source, const std::string& domain) {
      md << "| " << label << " |";
      for (const auto& [pipeline, provider] : columns) {
        const auto it = source.find({use_case, domain, pipeline, provider});
        const Tally t = it == source.end() ? Tally{} : it->second;
        md << " " << t.sound_cell() << " | " << t.preferred_cell() << " |";
      }
      md << "\n";
    };
    for (const auto& [rank, domain] : domains) row(domain_label(domain), report.cells, domain);
    row("Overall", report.overall, "");
  }
  return md.str();
}

InstanceIndex instance_index(const std::vector<BenchInstance>& instances) {
  InstanceIndex index;
  for (const auto& inst : instances) {
    index[inst.id] = {to_string(inst.domain), inst.k, inst.target_plan.size()};
  }
  return index;
}

std::vector<BarDatum> fig_data(const std::vector<PipelineOutcome>& records, const InstanceIndex& index) {
  std::vector<BarDatum> out;
  for (const auto& o : records) {
    const auto it = index.find(o.instance_id);
    if (it == index.end()) throw Error(ErrorCode::kUnknownInstance, "no ground truth for '" + o.instance_id + "'");
    out.push_back({o.instance_id, it->second.domain, o.pipeline, o.use_case, it->second.edit_size,
                   it->second.plan_size, o.sound ? 1 : -1});
  }
  std::sort(out.begin(), out.end(), [](const BarDatum& a, const BarDatum& b) {
    return std::make_tuple(domain_rank(a.domain), a.domain, a.edit_size, a.instance_id, a.use_case, a.pipeline) <
           std::make_tuple(domain_rank(b.domain), b.domain, b.edit_size, b.instance_id, b.use_case, b.pipeline);
  });
  return out;
}

std::string fig_data_csv(const std::vector<BarDatum>& data) {
  std::string out = "instance_id,domain,pipeline,edit_size,plan_size,value,use_case\n";
  for (const auto& d : data) {
    out += d.instance_id + "," + d.domain + "," + to_string(d.pipeline) + "," + std::to_string(d.edit_size) + "," +
           std::to_string(d.plan_size) + "," + std::to_string(d.value) + "," + to_string(d.use_case) + "\n";
  }
  return out;
}

}  // namespace modelspace
