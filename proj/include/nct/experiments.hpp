#pragma once

// The experiment drivers. Each one reads a Config, runs on the configured
// number of workers, and returns an ExperimentRecord whose observables are a
// deterministic function of the config (timings live in the diagnostics).

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "nct/cache.hpp"
#include "nct/config.hpp"
#include "nct/nc_algebra.hpp"
#include "nct/operator_assembly.hpp"

namespace nct {

struct Observable {
  std::string parameter;
  double observed = 0.0;
  double predicted = 0.0;
  double discrepancy = 0.0;

  friend bool operator==(const Observable&, const Observable&) = default;
};

/// |observed - predicted| / max(|predicted|, floor)
double relative_discrepancy(double observed, double predicted, double floor = 1e-12);

struct ExperimentRecord {
  std::string kind;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<Observable> observables;
  double predicted_constant = 0.0;
  double max_discrepancy = 0.0;
  double runtime_seconds = 0.0;
  nlohmann::json diagnostics = nlohmann::json::object();
  std::vector<std::string> failures;  // empty iff every threshold is met
  bool passed = false;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

enum class CachePolicy { off, use, refresh };

struct RunContext {
  Cache* cache = nullptr;  // required unless policy is off
  CachePolicy policy = CachePolicy::off;
};

/// Torus dimension, theta and an element parsed from [operator].
ThetaMatrix theta_from_config(const Config& cfg);
FourierElement element_from_config(const Config& cfg, const std::string& key);

/// splitmix64 finaliser; instance i of a run uses std::mt19937_64(derive_seed(seed, i)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
/// G^H G / ||G^H G|| with G an n x n matrix of complex standard normals.
MatrixXcd random_psd(std::mt19937_64& rng, int n);
/// (G + G^H) / 2 with G as above.
MatrixXcd random_hermitian(std::mt19937_64& rng, int n);

ExperimentRecord run_cif(const Config& cfg, RunContext& ctx);
ExperimentRecord run_weyl_sweep(const Config& cfg, RunContext& ctx);
ExperimentRecord run_bs_check(const Config& cfg, RunContext& ctx);
ExperimentRecord run_csz_identity(const Config& cfg, RunContext& ctx);
ExperimentRecord run_zeta_residue(const Config& cfg, RunContext& ctx);
ExperimentRecord run_norms(const Config& cfg, RunContext& ctx);
/// Dispatches on experiment.kind.
ExperimentRecord run_experiment(const Config& cfg, RunContext& ctx);

/// h grid from [grid]: h_values if given, else h_start * h_ratio^k.
std::vector<double> h_grid(const Config& cfg);
/// Lattice radius for a Weyl sweep point: ceil(sqrt(||V||_1 + |lambda|) / h) + r + 1,
/// with r the support radius of V.
int weyl_radius(const FourierElement& v, double lambda, double h);

struct BsInstance {
  VectorXd t;    // diagonal of T, entries >= 0
  MatrixXcd v;   // Hermitian
  double h = 0.0;
};
struct BsCounts {
  Index lhs = 0;  // N(0, hT + V)
  Index rhs = 0;  // #eigenvalues of -W + h(1+T)^{-1} above h, W = (1+T)^{-1/2} V (1+T)^{-1/2}
  bool tie = false;
};
BsCounts birman_schwinger_counts(const BsInstance& inst);

struct SuiteResult {
  std::string name;
  bool passed = false;
  double measure = 0.0;  // worst defect, or failing-instance count for integer suites
  std::string detail;
};

/// max |gamma_j gamma_k + gamma_k gamma_j - 2 delta_jk| over j, k (entrywise).
double clifford_defect(int d);
/// max |rho(U_j) rho(U_k) - e^{2 pi i theta_jk} rho(U_k) rho(U_j)| over the
/// columns n with |n|_inf <= N - 2, where both products stay inside the truncation.
double weyl_relation_defect(const ThetaMatrix& theta, int radius);
/// max |g_product - g_tanh| and |g_eval - g_tanh| over 0.01 <= |t| <= 20 for the given z.
double g_dual_form_defect(const std::vector<cplx>& zs);

/// Birman-Schwinger equality on 100 random instances, Clifford relations for
/// d = 2..6, Weyl relations and the g_z dual form.
std::vector<SuiteResult> run_selftest(std::uint64_t seed);

}  // namespace nct
