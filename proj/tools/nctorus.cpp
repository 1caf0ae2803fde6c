// nctorus: run the torus experiments from a config file.
//
//   nctorus <cif|weyl|bs|csz|zeta|norms> --config FILE [--out DIR] [--set section.key=value ...] [-v]
//   nctorus selftest [--seed N] [--out DIR]
//
// Exit codes: 0 success, 1 a threshold in the config was violated, 2 usage
// or config error (nothing is written in that case).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nct/cache.hpp"
#include "nct/config.hpp"
#include "nct/experiments.hpp"
#include "nct/kernels.hpp"
#include "nct/spectral.hpp"
#include "nct/tables.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kThreshold = 1;
constexpr int kUsage = 2;

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
  std::string cache_dir;
  bool scalar = false;
  int verbose = 0;
};

int run_experiment_command(const std::string& kind, const Options& opt) {
  nct::Config cfg;
  try {
    cfg = nct::Config::load(opt.config);
    for (const auto& kv : opt.overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw nct::ConfigError("override '" + kv + "' must be section.key=value");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.set("experiment.kind", kind);
  } catch (const nct::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  }

  const std::filesystem::path out = opt.out.empty() ? std::filesystem::path("out") / kind : std::filesystem::path(opt.out);
  nct::Cache cache(opt.cache_dir.empty() ? nct::Cache::default_root() : std::filesystem::path(opt.cache_dir));
  nct::RunContext ctx;
  ctx.cache = &cache;
  ctx.policy = nct::CachePolicy::use;

  nct::ExperimentRecord rec;
  try {
    rec = nct::run_experiment(cfg, ctx);
  } catch (const nct::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::length_error& e) {
    std::cerr << "size limit: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "experiment failed: " << e.what() << "\n";
    return kThreshold;
  }

  nct::emit_tables(rec, out);
  {
    std::ofstream c(out / "config.cfg");
    c << cfg.serialize();
  }
  std::cout << nct::summary_text(rec);
  if (opt.verbose > 0) std::cout << "\ndiagnostics:\n" << rec.diagnostics.dump(2) << "\n";
  std::cout << "artifacts    " << out.string() << "\n";
  return rec.passed ? kOk : kThreshold;
}

int run_selftest_command(std::uint64_t seed, const std::string& out) {
  const auto results = nct::run_selftest(seed);
  bool all = true;
  nlohmann::json j = nlohmann::json::array();
  std::cout << "selftest seed " << seed << "\n";
  for (const auto& r : results) {
    all = all && r.passed;
    std::printf("%-28s %s  (%.3g; %s)\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.measure, r.detail.c_str());
    j.push_back({{"suite", r.name}, {"passed", r.passed}, {"measure", r.measure}, {"detail", r.detail}});
  }
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::ofstream f(std::filesystem::path(out) / "selftest.json");
    f << nlohmann::json{{"seed", seed}, {"suites", j}}.dump(2) << "\n";
  }
  return all ? kOk : kThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments on the noncommutative torus"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 1;

  const std::vector<std::pair<std::string, std::string>> kinds = {
      {"cif", "integration formula: lim t mu(t) of the symmetrised compact operator"},
      {"weyl", "semiclassical Weyl law sweep over h"},
      {"bs", "Birman-Schwinger counting identity on random instances"},
      {"csz", "integral representation of B^z A^z - (A^1/2 B A^1/2)^z"},
      {"zeta", "residues of the lattice and torus zeta functions"},
      {"norms", "singular-value inequalities on random instances"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : kinds) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config,-c", opt.config, "config file")->required();
    sub->add_option("--out,-o", opt.out, "output directory (default out/<subcommand>)");
    sub->add_option("--set,-s", opt.overrides, "override section.key=value")->take_all();
    sub->add_option("--cache-dir", opt.cache_dir, "cache root (default $NCT_CACHE_DIR or .nctorus-cache)");
    sub->add_flag("--scalar", opt.scalar, "use the scalar kernels only");
    sub->add_flag("-v,--verbose", opt.verbose, "print diagnostics");
    subs.push_back(sub);
  }
  auto* self = app.add_subcommand("selftest", "exact-identity suites");
  self->add_option("--seed", seed, "RNG seed");
  self->add_option("--out,-o", opt.out, "write selftest.json here");
  self->add_flag("--scalar", opt.scalar, "use the scalar kernels only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (opt.scalar) nct::kernels::set_isa(nct::kernels::Isa::scalar);

  if (self->parsed()) return run_selftest_command(seed, opt.out);
  for (auto* sub : subs)
    if (sub->parsed()) return run_experiment_command(sub->get_name(), opt);
  return kUsage;
}
