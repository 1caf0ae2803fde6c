#pragma once

// Lattice zeta F(z) = sum_{n in Z^d} (1 + |n|^2)^{-z/2}, residue extraction
// at a simple pole, and estimators that turn a finite singular-value
// sequence into a verdict about lim t mu(t).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include <json.hpp>

#include "nct/operator_assembly.hpp"
#include "nct/spectral.hpp"

namespace nct {

/// 2 pi^{d/2} / Gamma(d/2); 2 for d = 1.
double sphere_volume(int d);

/// Gamma on the complex plane (Lanczos, g = 7, with reflection). Relative
/// accuracy ~1e-15 away from the poles.
cplx gamma_complex(cplx s);

struct ZetaValue {
  cplx value;
  double error_estimate = 0.0;
};

/// Theta-function evaluation: with s = z/2,
///   F = 1 + [pi^{d/2} gamma(s - d/2, 1) + I_0 - gamma(s, 1) + I_1] / Gamma(s),
/// where I_0 integrates t^{s-1} e^{-t} (pi/t)^{d/2} ((1 + 2E(t))^d - 1) over
/// (0, 1] with E(t) = sum_k exp(-pi^2 k^2 / t), and I_1 integrates
/// t^{s-1} e^{-t} (Theta(t)^d - 1) over [1, inf). Throws std::domain_error
/// for Re(z) <= d and ConvergenceError if tol cannot be met.
ZetaValue lattice_zeta_detail(int d, cplx z, double tol = 1e-12);
cplx lattice_zeta(int d, cplx z, double tol = 1e-12);

struct DirectSum {
  cplx value;        // sum over |n|_inf <= R
  double tail_bound;  // rigorous bound on |F - value|
};
/// Brute-force cube sum through the histogram of |n|^2 values.
DirectSum lattice_zeta_direct(int d, cplx z, int radius);
/// (1 + sqrt(d)/(2R))^{Re z} Vol(S^{d-1}) (R + 1/2)^{d - Re z} / (Re z - d).
double lattice_zeta_tail_bound(int d, cplx z, int radius);

struct ResidueEstimate {
  double pole = 0.0;
  double residue = 0.0;
  std::vector<double> eps;
  std::vector<double> samples;  // eps * F(pole + eps)
  double slope = 0.0;           // least-squares slope of samples against eps
  double model_error = 0.0;     // |P_all(0) - P_{all but coarsest}(0)|
  bool converged = false;       // model_error <= 1e-3 |residue|
};

/// Polynomial (Neville) extrapolation of eps F(p + eps) to eps = 0. Needs at
/// least 3 positive eps values with max/min >= 10.
ResidueEstimate residue_at(const std::function<double(double)>& f, double p,
                           const std::vector<double>& eps_grid = {0.32, 0.16, 0.08, 0.04, 0.02});
nlohmann::json to_json(const ResidueEstimate& r);

/// tau(a^z) Tr((1 - Delta)^{-z/2}), with tau(a^z) taken from the truncation.
/// Eigenvalues of the truncation below -1e-10 ||a|| raise std::domain_error.
cplx torus_zeta(const FourierElement& a, cplx z, const TruncationLattice& lat);

struct WindowMean {
  std::size_t lo = 0;  // inclusive
  std::size_t hi = 0;  // exclusive
  double mean = 0.0;   // mean of (k+1) mu(k) over [lo, hi)
};

struct LimitEstimate {
  double estimate = 0.0;      // mean of (k+1) mu(k) over [cutoff/2, cutoff)
  double extrapolated = 0.0;  // Aitken delta^2 on the last three window means
  std::vector<WindowMean> windows;  // [2^j - 1, 2^{j+1} - 1) below the cutoff
  double spread = 0.0;              // max - min over the last three window means
  std::size_t cutoff = 0;
};

/// Ranks k < cutoff are trusted. Throws std::invalid_argument when fewer
/// than two dyadic windows fit.
LimitEstimate limit_t_mu(const SingularValueSequence& s, std::size_t cutoff);
nlohmann::json to_json(const LimitEstimate& e);

/// floor(rho * dim_safe), where dim_safe counts the lattice points whose
/// rows are untouched by the truncation.
std::size_t trusted_rank_cutoff(std::size_t dim_safe, double rho = 0.25);

/// (1/(n+1)) sum_{k=2^m}^{2^{n+m+1}-2} mu(k) for each m. Throws
/// std::length_error if the sequence is too short.
std::vector<double> dyadic_means(const SingularValueSequence& s, int n, const std::vector<int>& m_list);

/// c / p, the value of lim t mu(t, T^p) when Tr(T^z) has residue c at z = p.
double wiener_ikehara_predict(double c, double p);

/// Rows "k,t_mu" with t_mu = (k+1) mu(k).
void write_t_mu_csv(const SingularValueSequence& s, const std::filesystem::path& path);

}  // namespace nct
