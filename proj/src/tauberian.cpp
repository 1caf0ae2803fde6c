#include "nct/tauberian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>

#include "nct/kernels.hpp"

namespace nct {

namespace {

constexpr double kPi = std::numbers::pi;

void require_strip(cplx z, const char* who) {
  if (!(z.real() > 1.0)) throw std::domain_error(std::string(who) + ": requires Re(z) > 1");
}

// e^w - 1 without cancellation for small |w|.
cplx expm1_c(cplx w) {
  const double x = w.real(), y = w.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// tanh(w) evaluated through e^{-2|Re w|} so large arguments cannot overflow.
cplx tanh_c(cplx w) {
  if (w.real() < 0.0) return -tanh_c(-w);
  const cplx e = std::exp(-2.0 * w);
  return (1.0 - e) / (1.0 + e);
}

}  // namespace

cplx g_z_product(cplx z, double t) {
  if (t == 0.0) return 1.0 - 0.5 * z;
  const cplx num = std::exp(0.5 * z * t) - std::exp(-0.5 * z * t);
  const double den1 = std::exp(0.5 * t) - std::exp(-0.5 * t);
  const cplx den2 = std::exp(0.5 * (z - 1.0) * t) + std::exp(-0.5 * (z - 1.0) * t);
  return 1.0 - num / (den1 * den2);
}

cplx g_z_tanh(cplx z, double t) {
  if (t == 0.0) return 1.0 - 0.5 * z;
  return 0.5 * (1.0 - tanh_c(0.5 * (z - 1.0) * t) / std::tanh(0.5 * t));
}

cplx g_z_eval(cplx z, double t) {
  require_strip(z, "g_z_eval");
  if (t == 0.0) return 1.0 - 0.5 * z;
  const double u = std::abs(t);
  const cplx num = std::exp(-u) * expm1_c(-(z - 2.0) * u);
  const cplx den = -std::expm1(-u) * (1.0 + std::exp(-(z - 1.0) * u));
  return num / den;
}

GzTransform::GzTransform(cplx z, double tol) : z_(z), tol_(tol) {
  require_strip(z, "GzTransform");
  if (!(tol > 0.0)) throw std::invalid_argument("GzTransform: tolerance must be positive");
  // |g_z(t)| <~ (1 + |z|) e^{-kappa |t|} with kappa = min(1, Re z - 1)
  const double kappa = std::min(1.0, z.real() - 1.0);
  t_max_ = (std::log(1.0 / tol) + std::log(4.0 * (1.0 + std::abs(z)) / kappa)) / kappa;
  h0_ = 0.25;
}

double GzTransform::strip_width() const {
  const cplx w = z_ - 1.0;
  return std::min(2.0 * kPi, kPi * w.real() / std::norm(w));
}

void GzTransform::ensure_level(int l) {
  while (static_cast<int>(samples_.size()) <= l) {
    const int cur = static_cast<int>(samples_.size());
    std::vector<cplx> fresh;
    if (cur == 0) {
      const auto count = static_cast<std::size_t>(std::ceil(t_max_ / h0_)) + 1;
      for (std::size_t k = 0; k < count; ++k) fresh.push_back(g_z_eval(z_, static_cast<double>(k) * h0_));
    } else {
      const double h = h0_ / std::ldexp(1.0, cur);
      const auto count = static_cast<std::size_t>(std::ceil(t_max_ / (2.0 * h)));
      for (std::size_t k = 0; k < count; ++k) fresh.push_back(g_z_eval(z_, static_cast<double>(2 * k + 1) * h));
    }
    samples_.push_back(std::move(fresh));
  }
}

GHatValue GzTransform::operator()(double xi) {
  constexpr int kMaxLevels = 14;
  // S_l accumulates cos(xi t_k) g(t_k) over all t_k > 0 seen up to level l.
  cplx sum = 0.0;
  cplx previous = 0.0;
  std::size_t nodes = 0;
  for (int l = 0; l < kMaxLevels; ++l) {
    ensure_level(l);
    const auto& fresh = samples_[static_cast<std::size_t>(l)];
    const double h = h0_ / std::ldexp(1.0, l);
    cplx part = 0.0;
    if (l == 0) {
      for (std::size_t k = 1; k < fresh.size(); ++k) part += std::cos(xi * static_cast<double>(k) * h) * fresh[k];
    } else {
      for (std::size_t k = 0; k < fresh.size(); ++k)
        part += std::cos(xi * static_cast<double>(2 * k + 1) * h) * fresh[k];
    }
    sum += part;
    nodes += fresh.size();
    const cplx g0 = samples_[0][0];
    const cplx value = (h / kPi) * (0.5 * g0 + sum);
    const double err = std::abs(value - previous);
    if (l >= 2 && std::abs(xi) * h <= kPi && err <= tol_) return {value, {t_max_, nodes, err}};
    previous = value;
  }
  throw ConvergenceError("GzTransform: tolerance unreachable within the node budget");
}

GHatValue g_hat(cplx z, double xi, double tol) {
  GzTransform tr(z, tol);
  return tr(xi);
}

CszPair::CszPair(const MatrixXcd& a, const MatrixXcd& b) : a_(eig_hermitian(a)), b_(eig_hermitian(b)) {
  if (a.rows() != b.rows()) throw std::invalid_argument("CszPair: A and B must have the same size");
  a_half_ = matrix_power(a_, 0.5);
  b_ahalf_ = b * a_half_;
  const MatrixXcd y = a_half_ * b * a_half_;
  y_ = eig_hermitian(0.5 * (y + y.adjoint()));
}

MatrixXcd CszPair::base_commutator() const { return b_ahalf_ * a_half_ - a_half_ * b_ahalf_; }

MatrixXcd CszPair::t_z(cplx z, double s) const {
  require_strip(z, "T_z_s");
  auto comm = [&](const MatrixXcd& x) -> MatrixXcd { return b_ahalf_ * x - x * b_ahalf_; };
  const cplx is(0.0, s);
  if (s == 0.0) return pow_b(z - 1.0) * comm(pow_a(z - 0.5)) + comm(a_half_) * pow_y(z - 1.0);
  return pow_b(z - 1.0 + is) * comm(pow_a(z - 0.5 + is)) * pow_y(-is) +
         pow_b(is) * comm(pow_a(0.5 + is)) * pow_y(z - 1.0 - is);
}

MatrixXcd CszPair::lhs(cplx z) const { return pow_b(z) * pow_a(z) - pow_y(z); }

MatrixXcd T_z_s(const MatrixXcd& a, const MatrixXcd& b, cplx z, double s) { return CszPair(a, b).t_z(z, s); }

CszReport csz_identity_residual(const MatrixXcd& a, const MatrixXcd& b, cplx z, const CszOptions& opt,
                                GzTransform* shared) {
  require_strip(z, "csz_identity_residual");
  CszReport rep;
  rep.z = z;
  rep.dim = a.rows();

  const double alpha = operator_norm(a);
  const double beta = weak_quasinorm(singular_values(b), opt.weak_p);
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("csz_identity_residual: A and B must be nonzero");
  const CszPair pair(a / alpha, b / beta);
  const double rescale = std::pow(alpha * beta, z.real());  // |(alpha beta)^z|

  const MatrixXcd product = matrix_power(eig_hermitian(b / beta), z) * matrix_power(eig_hermitian(a / alpha), z);
  const MatrixXcd lhs = pair.lhs(z);
  const double scale_f = std::max(product.norm(), std::numeric_limits<double>::min());

  std::optional<GzTransform> local;
  if (shared == nullptr || shared->z() != z) local.emplace(z, 1e-14);
  GzTransform& gz = local ? *local : *shared;

  std::map<double, cplx> ghat_memo;
  auto ghat = [&](double s) {
    const double key = std::abs(s);  // g_z is even, so ghat_z is even
    auto it = ghat_memo.find(key);
    if (it != ghat_memo.end()) return it->second;
    const cplx v = gz(key).value;
    ghat_memo.emplace(key, v);
    return v;
  };

  // Truncate the s-range where |ghat(S)| ||T(S)|| is negligible (measured).
  double s_max = (std::log(1.0 / opt.tol) + 8.0) / gz.strip_width();
  for (int guard = 0; guard < 40; ++guard) {
    const double tail = std::abs(ghat(s_max)) * pair.t_z(z, s_max).norm() * (1.0 + s_max);
    if (tail <= 0.01 * opt.tol * scale_f) break;
    s_max *= 1.25;
  }
  rep.s_max = s_max;
  rep.t_max = gz.t_max();

  const Index n = a.rows();
  auto add_node = [&](MatrixXcd& acc, double s) {
    const MatrixXcd t = pair.t_z(z, s);
    kernels::axpy(ghat(s), std::span<const cplx>(t.data(), static_cast<std::size_t>(t.size())),
                  std::span<cplx>(acc.data(), static_cast<std::size_t>(acc.size())));
    ++rep.quad_nodes;
  };

  // Nested trapezoid rule on [-s_max, s_max].
  int cells = 32;
  double h = 2.0 * s_max / cells;
  MatrixXcd sum = MatrixXcd::Zero(n, n);
  for (int k = 0; k <= cells; ++k) add_node(sum, -s_max + k * h);
  MatrixXcd integral = h * sum;
  bool converged = false;
  for (int level = 1; level <= opt.max_levels; ++level) {
    for (int k = 0; k < cells; ++k) add_node(sum, -s_max + (k + 0.5) * h);
    cells *= 2;
    h *= 0.5;
    MatrixXcd next = h * sum;
    const double change = (next - integral).norm();
    integral = std::move(next);
    if (level >= 2 && change <= opt.tol * scale_f) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("csz_identity_residual: quadrature budget exceeded");

  const MatrixXcd rhs = pair.t_z(z, 0.0) - integral;
  const double residual = trace_norm(lhs - rhs);
  const double lhs_norm = trace_norm(product);
  rep.residual = residual * rescale;
  rep.lhs_norm = lhs_norm * rescale;
  rep.relative_residual = residual / lhs_norm;
  return rep;
}

nlohmann::json to_json(const CszReport& r) {
  return {{"z", {r.z.real(), r.z.imag()}},
          {"dims", r.dim},
          {"seed", r.seed},
          {"residual", r.residual},
          {"relative_residual", r.relative_residual},
          {"lhs_norm", r.lhs_norm},
          {"quad_nodes", r.quad_nodes},
          {"s_max", r.s_max},
          {"T_max", r.t_max}};
}

cplx phi_diff(cplx z1, cplx z2, double t) {
  if (t < 0.0 || t > 1.0) throw std::domain_error("phi_diff: t must lie in [0, 1]");
  if (t == 0.0) return 0.0;
  const double lt = std::log(t);
  return std::exp(z1 * lt) - std::exp(z2 * lt);
}

PhiBoundsReport phi_bounds_check(cplx z1, cplx z2, std::size_t grid_points) {
  require_strip(z1, "phi_bounds_check");
  require_strip(z2, "phi_bounds_check");
  if (grid_points < 2) throw std::invalid_argument("phi_bounds_check: need at least two grid points");
  PhiBoundsReport rep;
  for (std::size_t i = 1; i < grid_points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const double lt = std::log(t);
    rep.sup_phi = std::max(rep.sup_phi, std::abs(std::exp(z1 * lt) - std::exp(z2 * lt)));
    rep.sup_dphi = std::max(rep.sup_dphi, std::abs(z1 * std::exp((z1 - 1.0) * lt) - z2 * std::exp((z2 - 1.0) * lt)));
  }
  const double gap = std::min(z1.real() - 1.0, z2.real() - 1.0);
  const double dz = std::abs(z1 - z2);
  rep.bound_phi = dz / gap;
  rep.bound_dphi = dz * std::max(std::abs(z1), std::abs(z2)) * (1.0 + 1.0 / gap);
  constexpr double slack = 1e-12;
  rep.holds = rep.sup_phi <= rep.bound_phi * (1.0 + slack) && rep.sup_dphi <= rep.bound_dphi * (1.0 + slack);
  return rep;
}

double sobolev_w22_norm(cplx z) {
  if (!(z.real() >= 2.0)) throw std::domain_error("sobolev_w22_norm: requires Re(z) >= 2");
  const double kappa = std::min(1.0, z.real() - 1.0);
  const double t_max = (40.0 + std::log(1.0 + std::abs(z))) / kappa;
  const double h = 1e-3;   // quadrature step
  const double fd = 1e-3;  // finite-difference step
  auto g = [&](double t) { return g_z_eval(z, t); };
  auto term = [&](double t) {
    const cplx gm2 = g(t - 2 * fd), gm1 = g(t - fd), g0 = g(t), gp1 = g(t + fd), gp2 = g(t + 2 * fd);
    const cplx d1 = (-gp2 + 8.0 * gp1 - 8.0 * gm1 + gm2) / (12.0 * fd);
    const cplx d2 = (-gp2 + 16.0 * gp1 - 30.0 * g0 + 16.0 * gm1 - gm2) / (12.0 * fd * fd);
    return std::norm(g0) + std::norm(d1) + std::norm(d2);
  };
  // even integrand: \int_R = 2 \int_0^inf, trapezoid with half weight at 0
  double acc = 0.5 * term(0.0);
  const auto count = static_cast<std::size_t>(std::ceil(t_max / h));
  for (std::size_t k = 1; k <= count; ++k) acc += term(static_cast<double>(k) * h);
  return std::sqrt(2.0 * h * acc);
}

}  // namespace nct
