#include "nct/tables.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nct {

namespace {

std::string g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// RFC 4180 quoting for the free-form parameter column
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

}  // namespace

nlohmann::json to_json(const ExperimentRecord& r) {
  nlohmann::json obs = nlohmann::json::array();
  for (const auto& o : r.observables)
    obs.push_back({{"parameter", o.parameter},
                   {"observed", o.observed},
                   {"predicted", o.predicted},
                   {"discrepancy", o.discrepancy}});
  return {{"kind", r.kind},
          {"config_hash", r.config_hash},
          {"seed", r.seed},
          {"observables", obs},
          {"predicted_constant", r.predicted_constant},
          {"max_discrepancy", r.max_discrepancy},
          {"runtime_seconds", r.runtime_seconds},
          {"diagnostics", r.diagnostics},
          {"failures", r.failures},
          {"passed", r.passed}};
}

ExperimentRecord record_from_json(const nlohmann::json& j) {
  ExperimentRecord r;
  r.kind = j.at("kind").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& o : j.at("observables"))
    r.observables.push_back({o.at("parameter").get<std::string>(), o.at("observed").get<double>(),
                             o.at("predicted").get<double>(), o.at("discrepancy").get<double>()});
  r.predicted_constant = j.at("predicted_constant").get<double>();
  r.max_discrepancy = j.at("max_discrepancy").get<double>();
  r.runtime_seconds = j.at("runtime_seconds").get<double>();
  r.diagnostics = j.at("diagnostics");
  r.failures = j.at("failures").get<std::vector<std::string>>();
  r.passed = j.at("passed").get<bool>();
  return r;
}

std::string observables_csv(const ExperimentRecord& r) {
  std::string out = std::string(kObservablesHeader) + "\n";
  for (const auto& o : r.observables)
    out += csv_field(o.parameter) + "," + g12(o.observed) + "," + g12(o.predicted) + "," + g12(o.discrepancy) + "\n";
  return out;
}

std::string summary_text(const ExperimentRecord& r) {
  std::string out;
  out += "experiment   " + r.kind + "\n";
  out += "config_hash  " + r.config_hash + "\n";
  out += "seed         " + std::to_string(r.seed) + "\n";
  out += "predicted    " + g12(r.predicted_constant) + "\n";
  out += "runtime_s    " + g12(r.runtime_seconds) + "\n";
  out += "\n";
  for (const auto& o : r.observables)
    out += "  " + o.parameter + "  observed " + g12(o.observed) + "  predicted " + g12(o.predicted) +
           "  discrepancy " + g12(o.discrepancy) + "\n";
  out += "\nmax_discrepancy " + g12(r.max_discrepancy) + "\n";
  for (const auto& f : r.failures) out += "FAIL: " + f + "\n";
  out += std::string("result       ") + (r.passed ? "PASS" : "FAIL") + "\n";
  return out;
}

void emit_tables(const ExperimentRecord& r, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "observables.csv", observables_csv(r));
  write_file(out_dir / "record.json", to_json(r).dump(2) + "\n");
  write_file(out_dir / "summary.txt", summary_text(r));
}

}  // namespace nct
