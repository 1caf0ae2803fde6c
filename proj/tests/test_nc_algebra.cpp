#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "nct/nc_algebra.hpp"
#include "nct/operator_assembly.hpp"

using namespace nct;
using Catch::Matchers::WithinAbs;

namespace {

FourierElement random_element(std::mt19937_64& rng, const ThetaMatrix& th, int terms, int radius) {
  std::uniform_int_distribution<int> idx(-radius, radius);
  std::normal_distribution<double> g;
  FourierElement a(th);
  for (int t = 0; t < terms; ++t) {
    MultiIndex n(static_cast<std::size_t>(th.dim()));
    for (auto& v : n) v = idx(rng);
    a.add_term(n, {g(rng), g(rng)});
  }
  return a;
}

double max_diff(const FourierElement& a, const FourierElement& b) {
  double worst = 0.0;
  const FourierElement diff = a - b;
  for (const auto& [n, c] : diff.coefficients()) worst = std::max(worst, std::abs(c));
  return worst;
}

ThetaMatrix generic3() {
  return ThetaMatrix(3, {0.0, 0.1234, -0.31, -0.1234, 0.0, 0.577, 0.31, -0.577, 0.0});
}

}  // namespace

TEST_CASE("theta matrices must be antisymmetric") {
  CHECK_THROWS_AS(ThetaMatrix(2, {0.0, 0.1, 0.1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ThetaMatrix(2, {0.1, 0.1, -0.1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ThetaMatrix(1, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ThetaMatrix(3, {0.0, 0.1, -0.1, 0.0}), std::invalid_argument);
  CHECK(ThetaMatrix::zero(4).is_zero());
  const auto b = ThetaMatrix::single_block(3, 0.25);
  CHECK(b(0, 1) == 0.25);
  CHECK(b(1, 0) == -0.25);
  CHECK(b(2, 0) == 0.0);
}

TEST_CASE("phase convention") {
  const auto th = ThetaMatrix::single_block(2, 0.25);
  const cplx s = phase({0, 1}, {1, 0}, th);
  CHECK_THAT(s.real(), WithinAbs(0.0, 1e-15));
  CHECK_THAT(s.imag(), WithinAbs(-1.0, 1e-15));
  CHECK(phase({1, 0}, {0, 1}, th) == cplx(1.0, 0.0));
  CHECK(phase({3, -2}, {5, 7}, ThetaMatrix::zero(2)) == cplx(1.0, 0.0));
}

TEST_CASE("generators satisfy the commutation relations in the algebra") {
  const auto th = generic3();
  for (int j = 1; j <= 3; ++j)
    for (int k = 1; k <= 3; ++k) {
      const auto uj = FourierElement::generator(th, j), uk = FourierElement::generator(th, k);
      const auto lhs = multiply(uj, uk);
      const auto rhs = std::polar(1.0, 2.0 * std::numbers::pi * th(j - 1, k - 1)) * multiply(uk, uj);
      CHECK(max_diff(lhs, rhs) <= 1e-15);
    }
}

TEST_CASE("twisted product is associative, adjoint is an anti-homomorphism, tau is a trace") {
  std::mt19937_64 rng(42);
  const auto th = generic3();
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = random_element(rng, th, 5, 2), b = random_element(rng, th, 5, 2), c = random_element(rng, th, 4, 1);
    CHECK(max_diff(multiply(multiply(a, b), c), multiply(a, multiply(b, c))) <= 1e-12);
    CHECK(max_diff(adjoint(multiply(a, b)), multiply(adjoint(b), adjoint(a))) <= 1e-12);
    CHECK(max_diff(adjoint(adjoint(a)), a) <= 1e-15);
    CHECK(std::abs(tau(multiply(a, b)) - tau(multiply(b, a))) <= 1e-12);
    // Parseval: tau(a* a) = sum |a(n)|^2
    double parseval = 0.0;
    for (const auto& [n, v] : a.coefficients()) parseval += std::norm(v);
    CHECK_THAT(tau(make_positive(a)).real(), WithinAbs(parseval, 1e-12));
    CHECK(make_positive(a).is_self_adjoint(1e-12));
    CHECK((a + adjoint(a)).is_self_adjoint(1e-13));
  }
}

TEST_CASE("rho is multiplicative on interior columns of the truncation") {
  std::mt19937_64 rng(7);
  const auto th = generic3();
  const TruncationLattice lat(3, 4);
  for (int rep = 0; rep < 3; ++rep) {
    const auto a = random_element(rng, th, 4, 1), b = random_element(rng, th, 4, 1);
    const MatrixXcd prod = rho_matrix_dense(a, lat) * rho_matrix_dense(b, lat);
    const MatrixXcd direct = rho_matrix_dense(multiply(a, b), lat);
    double worst = 0.0;
    for (Index c = 0; c < lat.size(); ++c)
      if (lat.sup_norm(c) <= 2) worst = std::max(worst, (prod.col(c) - direct.col(c)).cwiseAbs().maxCoeff());
    CHECK(worst <= 1e-13);
    // the adjoint element is represented by the adjoint matrix
    const MatrixXcd ra = rho_matrix_dense(a, lat);
    const MatrixXcd rs = rho_matrix_dense(adjoint(a), lat);
    double adj = 0.0;
    for (Index c = 0; c < lat.size(); ++c)
      if (lat.sup_norm(c) <= 3) adj = std::max(adj, (rs.col(c) - ra.adjoint().col(c)).cwiseAbs().maxCoeff());
    CHECK(adj <= 1e-14);
  }
}

TEST_CASE("U_1 is a pure shift and zero coefficients vanish") {
  const auto th = ThetaMatrix::single_block(2, 0.3);
  const TruncationLattice lat(2, 2);
  const MatrixXcd u1 = rho_matrix_dense(FourierElement::generator(th, 1), lat);
  for (Index c = 0; c < lat.size(); ++c) {
    auto n = lat.index(c);
    n[0] += 1;
    if (auto r = lat.position(n)) CHECK(u1(*r, c) == cplx(1.0, 0.0));
  }
  FourierElement a(th);
  a.add_term({1, 0}, 2.0);
  a.add_term({1, 0}, -2.0);
  CHECK(a.empty());
  CHECK_THROWS_AS(a.add_term({1, 0, 0}, 1.0), std::invalid_argument);
}

TEST_CASE("support radius, l1 norm and self-adjointness") {
  const auto th = ThetaMatrix::zero(3);
  const auto b = parse_element("2 1@1,0,0 1@-1,0,0", th);
  CHECK(b.support_radius() == 1);
  CHECK(b.l1_norm() == 4.0);
  CHECK(b.is_self_adjoint());
  CHECK(tau(b) == cplx(2.0, 0.0));
  CHECK_FALSE(parse_element("1@1,0,0", th).is_self_adjoint());
  CHECK(make_positive(parse_element("1 1@1,0,0", th)) == b);
}

TEST_CASE("text and JSON forms round-trip") {
  CHECK(parse_complex("i") == cplx(0, 1));
  CHECK(parse_complex("-i") == cplx(0, -1));
  CHECK(parse_complex("2-3i") == cplx(2, -3));
  CHECK(parse_complex("1e-3+2e+1i") == cplx(1e-3, 20));
  CHECK(parse_complex(" -0.5 ") == cplx(-0.5, 0));
  CHECK_THROWS_AS(parse_complex("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_complex(""), std::invalid_argument);

  std::mt19937_64 rng(3);
  const auto th = generic3();
  const auto a = random_element(rng, th, 6, 3);
  CHECK(parse_element(format_element(a), th) == a);
  CHECK(element_from_json(to_json(a)) == a);
  CHECK(theta_from_json(to_json(a)) == th);
  CHECK_THROWS_AS(parse_element("1@1,2", th), std::invalid_argument);
  CHECK_THROWS_AS(parse_element("1@x,0,0", th), std::invalid_argument);
  CHECK(parse_element("-1", th) == FourierElement::constant(th, -1.0));
}
