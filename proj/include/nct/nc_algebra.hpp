#pragma once

// Finite Fourier series on the noncommutative d-torus.
//
// An element is a = sum_n a(n) U^n with finitely many nonzero coefficients,
// where U^n := U_1^{n_1} U_2^{n_2} ... U_d^{n_d} (ordered product) and the
// unitary generators satisfy U_j U_k = exp(2 pi i theta_jk) U_k U_j.
// Normal ordering gives
//
//   U^m U^n = sigma(m, n) U^{m+n},   sigma(m, n) = exp(2 pi i sum_{j>k} theta_jk m_j n_k).
//
// This is the convention validated against the concrete representation on
// L2(T^d) in tests/test_nc_algebra.cpp.

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace nct {

using cplx = std::complex<double>;
using MultiIndex = std::vector<int>;

/// Antisymmetric real d x d matrix of rotation angles (in units of a full turn).
class ThetaMatrix {
 public:
  ThetaMatrix() = default;
  /// Row-major entries; throws std::invalid_argument unless d >= 2 and the
  /// matrix is exactly antisymmetric.
  ThetaMatrix(int d, std::vector<double> row_major);

  static ThetaMatrix zero(int d);
  /// theta_12 = value, theta_21 = -value, every other entry zero.
  static ThetaMatrix single_block(int d, double value);

  int dim() const { return d_; }
  double operator()(int j, int k) const { return entries_[static_cast<std::size_t>(j * d_ + k)]; }
  const std::vector<double>& row_major() const { return entries_; }
  bool is_zero() const;

  friend bool operator==(const ThetaMatrix&, const ThetaMatrix&) = default;

 private:
  int d_ = 0;
  std::vector<double> entries_;
};

/// sigma(m, n): U^m U^n = sigma(m, n) U^{m+n}.
cplx phase(const MultiIndex& m, const MultiIndex& n, const ThetaMatrix& theta);

class FourierElement {
 public:
  using Coefficients = std::map<MultiIndex, cplx>;  // lexicographic support order

  FourierElement() = default;
  explicit FourierElement(ThetaMatrix theta) : theta_(std::move(theta)) {}

  static FourierElement constant(const ThetaMatrix& theta, cplx c);
  static FourierElement monomial(const ThetaMatrix& theta, const MultiIndex& n, cplx c = 1.0);
  /// U_j for j in 1..d.
  static FourierElement generator(const ThetaMatrix& theta, int j);

  const ThetaMatrix& theta() const { return theta_; }
  int dim() const { return theta_.dim(); }
  const Coefficients& coefficients() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }

  /// Coefficient at n (zero if absent).
  cplx coefficient(const MultiIndex& n) const;
  /// Adds c to the coefficient at n; the entry is erased if it becomes exactly zero.
  void add_term(const MultiIndex& n, cplx c);
  /// max_{n in support} |n|_inf, 0 for an empty element.
  int support_radius() const;
  /// sum_n |a(n)|, an upper bound on the operator norm.
  double l1_norm() const;
  bool is_self_adjoint(double tol = 1e-14) const;

  FourierElement& operator+=(const FourierElement& other);
  FourierElement& operator*=(cplx c);
  friend FourierElement operator+(FourierElement a, const FourierElement& b) { return a += b; }
  friend FourierElement operator-(FourierElement a, const FourierElement& b);
  friend FourierElement operator*(cplx c, FourierElement a) { return a *= c; }

  friend bool operator==(const FourierElement&, const FourierElement&) = default;

 private:
  void check_index(const MultiIndex& n) const;

  ThetaMatrix theta_;
  Coefficients coeffs_;
};

/// Twisted convolution: (ab)(k) = sum_{m+n=k} a(m) b(n) sigma(m, n).
FourierElement multiply(const FourierElement& a, const FourierElement& b);
/// a*, with (U^n)* = conj(sigma(n, -n)) U^{-n}.
FourierElement adjoint(const FourierElement& a);
/// Tracial state: the zeroth Fourier coefficient.
cplx tau(const FourierElement& a);
/// b* b.
FourierElement make_positive(const FourierElement& b);

// Serialization. Schema (docs/formats.md):
//   {"d": 3, "theta": [row-major d*d reals],
//    "coeffs": [{"index": [n_1, ..., n_d], "re": x, "im": y}, ...]}
nlohmann::json to_json(const ThetaMatrix& theta);
ThetaMatrix theta_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FourierElement& a);
FourierElement element_from_json(const nlohmann::json& j);

/// Parses the compact text form used in config files: whitespace separated
/// terms "c@n_1,...,n_d" where c is a complex literal such as 2, -0.5, 1+2i, 3i.
/// A bare literal without "@" is a constant term.
FourierElement parse_element(const std::string& text, const ThetaMatrix& theta);
std::string format_element(const FourierElement& a);

/// Parses "a", "a+bi", "a-bi", "bi", "i", "-i". Throws std::invalid_argument.
cplx parse_complex(const std::string& text);
std::string format_complex(cplx c);

}  // namespace nct
