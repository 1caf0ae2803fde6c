#include "nct/zeta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <span>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nct/kernels.hpp"

namespace nct {

namespace {

constexpr double kPi = std::numbers::pi;

// sum_{k>=0} (-1)^k / (k! (a + k)) = \int_0^1 t^{a-1} e^{-t} dt, Re(a) > 0
cplx lower_gamma_unit(cplx a) {
  cplx sum = 1.0 / a;
  double fact = 1.0;
  for (int k = 1; k < 80; ++k) {
    fact *= k;
    const cplx term = ((k % 2) ? -1.0 : 1.0) / (fact * (a + static_cast<double>(k)));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

cplx cpow_pos(double t, cplx w) { return std::exp(w * std::log(t)); }

}  // namespace

double sphere_volume(int d) {
  if (d < 1) throw std::invalid_argument("sphere_volume: d must be positive");
  if (d == 1) return 2.0;
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

cplx gamma_complex(cplx s) {
  static constexpr std::array<double, 9> p = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                              771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                              -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (s.real() < 0.5) return kPi / (std::sin(kPi * s) * gamma_complex(1.0 - s));
  s -= 1.0;
  cplx x = p[0];
  for (int i = 1; i < 9; ++i) x += p[static_cast<std::size_t>(i)] / (s + static_cast<double>(i));
  const cplx t = s + 7.5;
  return std::sqrt(2.0 * kPi) * std::exp((s + 0.5) * std::log(t) - t) * x;
}

ZetaValue lattice_zeta_detail(int d, cplx z, double tol) {
  if (d < 1) throw std::invalid_argument("lattice_zeta: d must be positive");
  if (!(z.real() > d)) throw std::domain_error("lattice_zeta: requires Re(z) > d");
  if (!(tol > 0.0)) throw std::invalid_argument("lattice_zeta: tolerance must be positive");
  using boost::math::quadrature::gauss_kronrod;
  const cplx s = 0.5 * z;
  const cplx a = s - 0.5 * d;
  const double pid = std::pow(kPi, 0.5 * d);

  // small t: Jacobi inversion Theta(t) = sqrt(pi/t) (1 + 2 E(t))
  auto small = [&](double t) -> cplx {
    double e = 0.0;
    for (int k = 1; k <= 4; ++k) e += std::exp(-kPi * kPi * k * k / t);
    if (e == 0.0) return 0.0;
    return pid * cpow_pos(t, a - 1.0) * std::exp(-t) * std::expm1(d * std::log1p(2.0 * e));
  };
  auto large = [&](double t) -> cplx {
    double th = 0.0;
    for (int k = 1;; ++k) {
      const double term = std::exp(-t * k * k);
      th += term;
      if (term <= 1e-18 * th) break;
    }
    return cpow_pos(t, s - 1.0) * std::exp(-t) * std::expm1(d * std::log1p(2.0 * th));
  };

  const double qtol = std::min(1e-8, tol * 1e-2);
  double err0 = 0.0, err1 = 0.0;
  const cplx i0 = gauss_kronrod<double, 31>::integrate(small, 0.0, 1.0, 15, qtol, &err0);
  const cplx i1 = gauss_kronrod<double, 31>::integrate(large, 1.0, std::numeric_limits<double>::infinity(), 15,
                                                       qtol, &err1);
  const cplx gs = gamma_complex(s);
  const cplx numer = pid * lower_gamma_unit(a) + i0 - lower_gamma_unit(s) + i1;
  ZetaValue out;
  out.value = 1.0 + numer / gs;
  out.error_estimate = (err0 + err1) / std::abs(gs) +
                       1e-15 * (std::abs(numer / gs) + 1.0);
  if (!(out.error_estimate <= tol * std::max(1.0, std::abs(out.value))) || !std::isfinite(out.value.real()) ||
      !std::isfinite(out.value.imag()))
    throw ConvergenceError("lattice_zeta: requested tolerance not met");
  return out;
}

cplx lattice_zeta(int d, cplx z, double tol) { return lattice_zeta_detail(d, z, tol).value; }

double lattice_zeta_tail_bound(int d, cplx z, int radius) {
  if (!(z.real() > d)) throw std::domain_error("lattice_zeta_tail_bound: requires Re(z) > d");
  if (radius < 1) throw std::invalid_argument("lattice_zeta_tail_bound: radius must be positive");
  const double sigma2 = z.real();
  const double r = radius + 0.5;
  return std::pow(1.0 + std::sqrt(static_cast<double>(d)) / (2.0 * radius), sigma2) * sphere_volume(d) *
         std::pow(r, d - sigma2) / (sigma2 - d);
}

DirectSum lattice_zeta_direct(int d, cplx z, int radius) {
  if (d < 1 || radius < 1) throw std::invalid_argument("lattice_zeta_direct: need d >= 1 and radius >= 1");
  if (!(z.real() > d)) throw std::domain_error("lattice_zeta_direct: requires Re(z) > d");
  const std::size_t r2 = static_cast<std::size_t>(radius) * static_cast<std::size_t>(radius);
  std::vector<double> one(r2 + 1, 0.0);
  one[0] = 1.0;
  for (std::size_t j = 1; j <= static_cast<std::size_t>(radius); ++j) one[j * j] = 2.0;
  std::vector<double> hist = one;
  for (int k = 1; k < d; ++k) {
    std::vector<double> next(hist.size() + r2, 0.0);
    for (std::size_t b = 0; b < hist.size(); ++b) {
      if (hist[b] == 0.0) continue;
      for (std::size_t j = 0; j <= static_cast<std::size_t>(radius); ++j) next[b + j * j] += hist[b] * one[j * j];
    }
    hist = std::move(next);
  }
  const cplx s = 0.5 * z;
  cplx sum = 0.0;
  for (std::size_t m = hist.size(); m-- > 0;)
    if (hist[m] != 0.0) sum += hist[m] * std::exp(-s * std::log1p(static_cast<double>(m)));
  return {sum, lattice_zeta_tail_bound(d, z, radius)};
}

namespace {

double neville_at_zero(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> p = y;
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i) p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
  return p[0];
}

}  // namespace

ResidueEstimate residue_at(const std::function<double(double)>& f, double p, const std::vector<double>& eps_grid) {
  if (eps_grid.size() < 3) throw std::invalid_argument("residue_at: need at least 3 eps values");
  std::vector<double> eps = eps_grid;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  if (!(eps.back() > 0.0)) throw std::invalid_argument("residue_at: eps values must be positive");
  if (eps.front() < 10.0 * eps.back()) throw std::invalid_argument("residue_at: eps grid must span a decade");
  ResidueEstimate r;
  r.pole = p;
  r.eps = eps;
  for (double e : eps) r.samples.push_back(e * f(p + e));
  r.residue = neville_at_zero(r.eps, r.samples);
  const std::vector<double> x2(r.eps.begin() + 1, r.eps.end()), y2(r.samples.begin() + 1, r.samples.end());
  r.model_error = std::abs(r.residue - neville_at_zero(x2, y2));
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    mx += r.eps[i];
    my += r.samples[i];
  }
  mx /= static_cast<double>(eps.size());
  my /= static_cast<double>(eps.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    sxy += (r.eps[i] - mx) * (r.samples[i] - my);
    sxx += (r.eps[i] - mx) * (r.eps[i] - mx);
  }
  r.slope = sxy / sxx;
  r.converged = std::isfinite(r.residue) && r.model_error <= 1e-3 * std::abs(r.residue) + 1e-12;
  return r;
}

nlohmann::json to_json(const ResidueEstimate& r) {
  return {{"pole", r.pole},   {"residue", r.residue},         {"eps", r.eps},
          {"samples", r.samples}, {"slope", r.slope}, {"model_error", r.model_error},
          {"converged", r.converged}};
}

cplx torus_zeta(const FourierElement& a, cplx z, const TruncationLattice& lat) {
  if (lat.dim() != a.dim()) throw std::invalid_argument("torus_zeta: lattice and element dimensions differ");
  if (!a.is_self_adjoint(1e-12)) throw std::invalid_argument("torus_zeta: element must be self-adjoint");
  const double floor = -1e-10 * std::max(a.l1_norm(), 1.0);
  auto f = [&](double t) -> cplx {
    if (t <= 0.0) {
      if (t < floor) throw std::domain_error("torus_zeta: truncation of a is not positive semidefinite");
      return 0.0;
    }
    return cpow_pos(t, z);
  };
  return tau_of_function_complex(a, f, lat) * lattice_zeta(lat.dim(), z);
}

LimitEstimate limit_t_mu(const SingularValueSequence& s, std::size_t cutoff) {
  LimitEstimate e;
  e.cutoff = std::min(cutoff, s.size());
  std::vector<double> weight(e.cutoff);
  for (std::size_t k = 0; k < e.cutoff; ++k) weight[k] = static_cast<double>(k + 1);
  auto window_mean = [&](std::size_t lo, std::size_t hi) {
    const std::span<const double> w(weight.data() + lo, hi - lo), x(s.values.data() + lo, hi - lo);
    return kernels::dot(w, x) / static_cast<double>(hi - lo);
  };
  for (std::size_t j = 0;; ++j) {
    const std::size_t lo = (std::size_t{1} << j) - 1, hi = (std::size_t{1} << (j + 1)) - 1;
    if (hi > e.cutoff) break;
    e.windows.push_back({lo, hi, window_mean(lo, hi)});
  }
  if (e.windows.size() < 2) throw std::invalid_argument("limit_t_mu: fewer than two dyadic windows below the cutoff");
  e.estimate = window_mean(e.cutoff / 2, e.cutoff);

  const std::size_t w = e.windows.size();
  const std::size_t first = w >= 3 ? w - 3 : 0;
  double lo = e.windows[first].mean, hi = lo;
  for (std::size_t i = first; i < w; ++i) {
    lo = std::min(lo, e.windows[i].mean);
    hi = std::max(hi, e.windows[i].mean);
  }
  e.spread = hi - lo;
  e.extrapolated = e.windows.back().mean;
  if (w >= 3) {
    const double m1 = e.windows[w - 3].mean, m2 = e.windows[w - 2].mean, m3 = e.windows[w - 1].mean;
    const double denom = m3 - 2.0 * m2 + m1;
    if (denom != 0.0) {
      const double aitken = m3 - (m3 - m2) * (m3 - m2) / denom;
      if (std::isfinite(aitken)) e.extrapolated = aitken;
    }
  }
  return e;
}

nlohmann::json to_json(const LimitEstimate& e) {
  nlohmann::json windows = nlohmann::json::array();
  for (const auto& w : e.windows) windows.push_back({{"lo", w.lo}, {"hi", w.hi}, {"mean", w.mean}});
  return {{"estimate", e.estimate},
          {"extrapolated", e.extrapolated},
          {"spread", e.spread},
          {"cutoff", e.cutoff},
          {"windows", windows}};
}

std::size_t trusted_rank_cutoff(std::size_t dim_safe, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("trusted_rank_cutoff: rho must lie in (0, 1]");
  return static_cast<std::size_t>(std::floor(rho * static_cast<double>(dim_safe)));
}

std::vector<double> dyadic_means(const SingularValueSequence& s, int n, const std::vector<int>& m_list) {
  if (n < 0) throw std::invalid_argument("dyadic_means: n must be nonnegative");
  std::vector<double> out;
  for (int m : m_list) {
    if (m < 0 || n + m + 1 >= 62) throw std::invalid_argument("dyadic_means: offset out of range");
    const std::size_t lo = std::size_t{1} << m;
    const std::size_t hi = (std::size_t{1} << (n + m + 1)) - 2;  // inclusive
    if (hi >= s.size()) throw std::length_error("dyadic_means: window exceeds the available data");
    out.push_back(kernels::abs_sum(std::span<const double>(s.values.data() + lo, hi - lo + 1)) / (n + 1.0));
  }
  return out;
}

double wiener_ikehara_predict(double c, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("wiener_ikehara_predict: p must be positive");
  return c / p;
}

void write_t_mu_csv(const SingularValueSequence& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_t_mu_csv: cannot open " + path.string());
  out << "k,t_mu\n";
  char buf[64];
  for (std::size_t k = 0; k < s.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.12g\n", k, static_cast<double>(k + 1) * s[k]);
    out << buf;
  }
}

}  // namespace nct
