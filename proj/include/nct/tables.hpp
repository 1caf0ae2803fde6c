#pragma once

// Output artifacts for an ExperimentRecord:
//   observables.csv  parameter,observed,predicted,discrepancy (12 significant digits)
//   record.json      the full record, reloadable with record_from_json
//   summary.txt      human-readable summary with provenance

#include <filesystem>
#include <string>

#include <json.hpp>

#include "nct/experiments.hpp"

namespace nct {

inline constexpr const char* kObservablesHeader = "parameter,observed,predicted,discrepancy";

nlohmann::json to_json(const ExperimentRecord& r);
ExperimentRecord record_from_json(const nlohmann::json& j);

std::string observables_csv(const ExperimentRecord& r);
std::string summary_text(const ExperimentRecord& r);

/// Creates out_dir if needed and writes the three files.
void emit_tables(const ExperimentRecord& r, const std::filesystem::path& out_dir);

}  // namespace nct
