#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "nct/experiments.hpp"
#include "nct/operator_assembly.hpp"
#include "nct/spectral.hpp"

using namespace nct;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// (1/2pi) \int_0^{2pi} f(t) dt by the trapezoid rule (spectrally accurate for periodic f)
double circle_mean(const std::function<double(double)>& f, int nodes = 4096) {
  double acc = 0.0;
  for (int k = 0; k < nodes; ++k) acc += f(2.0 * std::numbers::pi * k / nodes);
  return acc / nodes;
}

}  // namespace

TEST_CASE("truncation lattice indexing") {
  const TruncationLattice lat(3, 2);
  CHECK(lat.size() == 125);
  CHECK(lat.index(0) == MultiIndex{-2, -2, -2});
  CHECK(lat.index(1) == MultiIndex{-2, -2, -1});  // last coordinate varies fastest
  CHECK(lat.index(lat.origin()) == MultiIndex{0, 0, 0});
  for (Index p = 0; p < lat.size(); ++p) {
    const auto n = lat.index(p);
    CHECK(lat.position(n) == p);
    CHECK(lat.norm_sq(p) == n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    CHECK(lat.sup_norm(p) == std::max({std::abs(n[0]), std::abs(n[1]), std::abs(n[2])}));
  }
  CHECK_FALSE(lat.position({3, 0, 0}).has_value());
  CHECK_THROWS_AS(TruncationLattice(3, 200, 1000), std::length_error);
  CHECK_THROWS_AS(TruncationLattice(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(TruncationLattice(2, -1), std::invalid_argument);
}

TEST_CASE("gamma matrices are Hermitian Clifford generators") {
  for (int d = 2; d <= 7; ++d) {
    const auto fam = gamma_family(d);
    CHECK(fam.spinor_dim == (1 << (d / 2)));
    CHECK(static_cast<int>(fam.matrices.size()) == d);
    CHECK(clifford_defect(d) == 0.0);
  }
  CHECK_THROWS_AS(gamma_family(1), std::invalid_argument);
}

TEST_CASE("D^2 equals |n|^2 on every spinor component") {
  const TruncationLattice lat(3, 2);
  const auto fam = gamma_family(3);
  const MatrixXcd dm = dirac_matrix(lat, fam).to_dense();
  const MatrixXcd sq = dm * dm;
  double worst = 0.0;
  for (Index i = 0; i < sq.rows(); ++i)
    for (Index j = 0; j < sq.cols(); ++j) {
      const double expect = i == j ? static_cast<double>(lat.norm_sq(i / fam.spinor_dim)) : 0.0;
      worst = std::max(worst, std::abs(sq(i, j) - expect));
    }
  CHECK(worst == 0.0);
}

TEST_CASE("Fourier multipliers are diagonal") {
  const TruncationLattice lat(2, 3);
  const auto bes = bessel_multiplier(lat, -1.5);
  const auto lap = laplacian(lat);
  CHECK(bes.storage() == HermitianOperator::Storage::diagonal);
  for (Index p = 0; p < lat.size(); ++p) {
    const double n2 = static_cast<double>(lat.norm_sq(p));
    CHECK_THAT(bes.diagonal_entries()(p).real(), WithinRel(std::pow(1.0 + n2, -0.75), 1e-15));
    CHECK(lap.diagonal_entries()(p).real() == n2);
  }
}

TEST_CASE("Weyl relations hold on interior columns") {
  const double s = std::sqrt(0.5);
  CHECK(weyl_relation_defect(ThetaMatrix(3, {0.0, s, 0.0, -s, 0.0, 0.0, 0.0, 0.0, 0.0}), 4) <= 1e-13);
  CHECK(weyl_relation_defect(ThetaMatrix(3, {0.0, 0.1, 0.2, -0.1, 0.0, 0.3, -0.2, -0.3, 0.0}), 4) <= 1e-13);
  CHECK(weyl_relation_defect(ThetaMatrix::zero(2), 6) == 0.0);
}

TEST_CASE("symmetrised compact operator") {
  const auto th = ThetaMatrix::single_block(3, std::sqrt(0.5));
  const TruncationLattice lat(3, 3);
  const auto one = symmetrized_compact(FourierElement::constant(th, 1.0), lat, 3.0);
  CHECK(one.storage() == HermitianOperator::Storage::diagonal);
  for (Index p = 0; p < lat.size(); ++p)
    CHECK_THAT(one.diagonal_entries()(p).real(), WithinRel(std::pow(1.0 + lat.norm_sq(p), -1.5), 1e-14));

  const auto b = parse_element("2 1@1,0,0 1@-1,0,0", th);
  const auto op = symmetrized_compact(b, lat, 3.0);
  CHECK(op.storage() == HermitianOperator::Storage::sparse);
  CHECK(op.hermitian());
  // the truncation of b is positive semidefinite, hence so is the compressed operator
  const auto ev = eigenvalues(op);
  CHECK(ev.front() >= -1e-14);
  CHECK_THROWS_AS(symmetrized_compact(parse_element("1@1,0,0", th), lat, 3.0), std::invalid_argument);
}

TEST_CASE("Schrodinger truncation with constant potential counts lattice points") {
  const auto th = ThetaMatrix::zero(3);
  const auto v = FourierElement::constant(th, -1.0);
  const TruncationLattice lat(3, 5);
  CHECK(count_below(schrodinger_matrix(lat, 0.5, v, 0.0, false), 0.0).count == 27);  // 1 + 6 + 12 + 8
  CHECK(count_below(schrodinger_matrix(lat, 0.5, v, 0.0, true), 0.0).count == 2 * 27);
}

TEST_CASE("tau of functions matches circle quadrature when theta = 0") {
  const auto th = ThetaMatrix::zero(3);
  const TruncationLattice lat(3, 40);
  const auto v = parse_element("-2 1@1,0,0 1@-1,0,0", th);
  const double value = tau_of_function(v, [](double t) { return t < 0 ? std::pow(-t, 1.5) : 0.0; }, lat);
  const double oracle = circle_mean([](double t) { return std::pow(2.0 - 2.0 * std::cos(t), 1.5); });
  CHECK_THAT(value, WithinRel(oracle, 1e-6));
  CHECK_THAT(oracle, WithinRel(32.0 / (3.0 * std::numbers::pi), 1e-12));

  const auto a = parse_element("2 1@1,0,0 1@-1,0,0", th);
  for (const cplx z : {cplx(3.0), cplx(2.5, 1.0)}) {
    const cplx got = tau_of_function_complex(
        a, [z](double t) { return t > 0 ? std::exp(z * std::log(t)) : cplx(0.0); }, TruncationLattice(3, 30));
    const double re = circle_mean([z](double t) { return std::real(std::exp(z * std::log(2.0 + 2.0 * std::cos(t) + 1e-300))); });
    const double im = circle_mean([z](double t) { return std::imag(std::exp(z * std::log(2.0 + 2.0 * std::cos(t) + 1e-300))); });
    CHECK_THAT(got.real(), WithinAbs(re, 1e-5));
    CHECK_THAT(got.imag(), WithinAbs(im, 1e-5));
  }
}

TEST_CASE("tau of a function of U_1 + U_1^* does not see theta") {
  const auto f = [](double t) { return std::exp(-t * t); };
  const auto v0 = parse_element("1@1,0,0 1@-1,0,0", ThetaMatrix::zero(3));
  const auto v1 = parse_element("1@1,0,0 1@-1,0,0", ThetaMatrix::single_block(3, std::sqrt(0.5)));
  const TruncationLattice lat(3, 12);
  CHECK_THAT(tau_of_function(v0, f, lat), WithinAbs(tau_of_function(v1, f, lat), 1e-14));
}

TEST_CASE("operator export and import round-trip") {
  const auto dir = std::filesystem::temp_directory_path() / "nct_export_test";
  std::filesystem::create_directories(dir);
  const auto th = ThetaMatrix::single_block(2, 0.2);
  const TruncationLattice lat(2, 3);
  const auto sparse = symmetrized_compact(parse_element("2 1@1,0 1@-1,0 0.5i@0,1 -0.5i@0,-1", th), lat, 2.0);
  const auto diag = bessel_multiplier(lat, -2.0);
  const auto dense = HermitianOperator::from_dense(sparse.to_dense());
  for (const auto* op : {&sparse, &diag, &dense}) {
    export_operator(*op, &lat, dir / "op");
    const auto back = import_operator(dir / "op");
    CHECK(back.storage() == op->storage());
    CHECK(back.dim() == op->dim());
    CHECK((back.to_dense() - op->to_dense()).cwiseAbs().maxCoeff() == 0.0);
  }
  std::filesystem::remove_all(dir);
}
