#pragma once

// The integral representation of B^z A^z - (A^{1/2} B A^{1/2})^z for
// positive matrices and the scalar kernel g_z that drives it.
//
//   T_z(0) = B^{z-1}[B A^{1/2}, A^{z-1/2}] + [B A^{1/2}, A^{1/2}] Y^{z-1}
//   T_z(s) = B^{z-1+is}[B A^{1/2}, A^{z-1/2+is}] Y^{-is}
//          + B^{is}[B A^{1/2}, A^{1/2+is}] Y^{z-1-is}                 (s != 0)
//   B^z A^z - Y^z = T_z(0) - \int T_z(s) ghat_z(s) ds,   Y = A^{1/2} B A^{1/2}
//
// with ghat_z(xi) = (1/2pi) \int e^{-i xi t} g_z(t) dt. The 1/2pi factor is
// required for the identity to hold; tests/test_tauberian.cpp pins it.

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "nct/hermitian_operator.hpp"
#include "nct/spectral.hpp"

namespace nct {

/// Literal product form 1 - (e^{zt/2} - e^{-zt/2}) / ((e^{t/2} - e^{-t/2})(e^{(z-1)t/2} + e^{-(z-1)t/2})).
/// Loses accuracy for |t| below ~1e-6 and overflows for large |t|.
cplx g_z_product(cplx z, double t);
/// Literal tanh form 1/2 (1 - tanh((z-1)t/2) / tanh(t/2)), t != 0.
cplx g_z_tanh(cplx z, double t);
/// Production evaluation. Uses tanh a - tanh b = sinh(a-b) / (cosh a cosh b) to get
///   g_z(t) = e^{-|t|} expm1(-(z-2)|t|) / (-expm1(-|t|) (1 + e^{-(z-1)|t|})),
/// which is stable for every t, exactly zero for z = 2 and equal to 1 - z/2 at t = 0.
/// Requires Re(z) > 1 (std::domain_error otherwise).
cplx g_z_eval(cplx z, double t);

struct QuadratureRule {
  double t_max = 0.0;          // truncation half-width
  std::size_t nodes = 0;       // samples of the integrand used
  double error_estimate = 0.0;  // |I_fine - I_coarse|
};

struct GHatValue {
  cplx value;
  QuadratureRule rule;
};

/// Fourier transform of g_z with cached samples, for repeated evaluation at many xi.
/// Trapezoid rule on [-t_max, t_max] (exponentially convergent for this
/// analytic, exponentially decaying integrand), halving the step until two
/// successive levels agree to `tol`.
class GzTransform {
 public:
  GzTransform(cplx z, double tol);

  cplx z() const { return z_; }
  double t_max() const { return t_max_; }
  /// Half-width of the strip around the real axis where g_z is analytic;
  /// |ghat_z(xi)| decays like exp(-strip * |xi|).
  double strip_width() const;

  /// Throws ConvergenceError when the level budget is exhausted.
  GHatValue operator()(double xi);

 private:
  void ensure_level(int l);

  cplx z_;
  double tol_;
  double t_max_;
  double h0_;
  std::vector<std::vector<cplx>> samples_;  // samples_[l]: new nodes of level l, t >= 0 half only
};

GHatValue g_hat(cplx z, double xi, double tol);

/// Precomputed spectral data of a positive pair (A, B) and Y = A^{1/2} B A^{1/2}.
class CszPair {
 public:
  CszPair(const MatrixXcd& a, const MatrixXcd& b);

  Index dim() const { return a_.eigenvalues.size(); }
  MatrixXcd t_z(cplx z, double s) const;
  /// B^z A^z - Y^z
  MatrixXcd lhs(cplx z) const;
  /// [B A^{1/2}, A^{1/2}], the commutator controlling ||T_z(s)||_1.
  MatrixXcd base_commutator() const;

 private:
  MatrixXcd pow_a(cplx w) const { return matrix_power(a_, w); }
  MatrixXcd pow_b(cplx w) const { return matrix_power(b_, w); }
  MatrixXcd pow_y(cplx w) const { return matrix_power(y_, w); }

  SpectralData a_, b_, y_;
  MatrixXcd b_ahalf_;  // B A^{1/2}
  MatrixXcd a_half_;
};

MatrixXcd T_z_s(const MatrixXcd& a, const MatrixXcd& b, cplx z, double s);

struct CszReport {
  cplx z;
  Index dim = 0;
  std::uint64_t seed = 0;
  double residual = 0.0;           // ||LHS - (T_z(0) - \int T_z ghat_z)||_1
  double relative_residual = 0.0;  // residual / ||B^z A^z||_1
  double lhs_norm = 0.0;           // ||B^z A^z||_1
  std::size_t quad_nodes = 0;
  double s_max = 0.0;
  double t_max = 0.0;
};

struct CszOptions {
  double tol = 1e-9;          // relative accuracy target for the s-integral
  double weak_p = 3.0;        // B is normalised to ||B||_{p,inf} = 1
  int max_levels = 14;
};

/// Evaluates both sides of the representation. A and B are rescaled
/// internally to ||A|| = 1 and ||B||_{p,inf} = 1; the reported norms are
/// in the caller's scale. A shared GzTransform may be passed to reuse
/// ghat samples across pairs with the same z.
CszReport csz_identity_residual(const MatrixXcd& a, const MatrixXcd& b, cplx z, const CszOptions& opt = {},
                                GzTransform* shared = nullptr);
nlohmann::json to_json(const CszReport& r);

/// t^{z1} - t^{z2} on [0, 1] (zero at t = 0).
cplx phi_diff(cplx z1, cplx z2, double t);

struct PhiBoundsReport {
  double sup_phi = 0.0;
  double sup_dphi = 0.0;
  double bound_phi = 0.0;   // |z1 - z2| / min(Re z1 - 1, Re z2 - 1)
  double bound_dphi = 0.0;  // |z1 - z2| max(|z1|, |z2|) (1 + 1 / min(Re z1 - 1, Re z2 - 1))
  bool holds = false;
};
PhiBoundsReport phi_bounds_check(cplx z1, cplx z2, std::size_t grid_points = 20001);

/// (||g||_2^2 + ||g'||_2^2 + ||g''||_2^2)^{1/2} by quadrature with
/// finite-difference derivatives. Requires Re(z) >= 2.
double sobolev_w22_norm(cplx z);

}  // namespace nct
