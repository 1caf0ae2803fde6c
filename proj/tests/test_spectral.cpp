#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "nct/experiments.hpp"
#include "nct/spectral.hpp"

using namespace nct;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SingularValueSequence seq(std::vector<double> v) {
  SingularValueSequence s;
  s.values = std::move(v);
  return s;
}

MatrixXcd diag(std::initializer_list<double> d) {
  VectorXcd v(static_cast<Index>(d.size()));
  Index k = 0;
  for (double x : d) v(k++) = x;
  return v.asDiagonal();
}

}  // namespace

TEST_CASE("eigendecomposition and singular values") {
  std::mt19937_64 rng(1);
  const MatrixXcd h = random_hermitian(rng, 12);
  const auto sd = eig_hermitian(h);
  CHECK(std::is_sorted(sd.eigenvalues.data(), sd.eigenvalues.data() + sd.eigenvalues.size()));
  const MatrixXcd rebuilt = sd.eigenvectors * sd.eigenvalues.cast<cplx>().asDiagonal() * sd.eigenvectors.adjoint();
  CHECK((rebuilt - h).norm() <= 1e-12 * h.norm());

  const auto sv = singular_values(h);
  sv.validate();
  std::vector<double> absev;
  for (Index k = 0; k < sd.eigenvalues.size(); ++k) absev.push_back(std::abs(sd.eigenvalues(k)));
  std::sort(absev.rbegin(), absev.rend());
  for (std::size_t k = 0; k < absev.size(); ++k) CHECK_THAT(sv[k], WithinAbs(absev[k], 1e-12));
  CHECK(sv.at(2.7) == sv[2]);
  CHECK(sv.at(100.0) == 0.0);
  CHECK_THROWS_AS(seq({1.0, 2.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(seq({1.0, -0.5}).validate(), std::invalid_argument);
}

TEST_CASE("matrix powers of positive matrices") {
  std::mt19937_64 rng(2);
  const MatrixXcd a = random_psd(rng, 8);
  const MatrixXcd half = matrix_power(a, 0.5);
  CHECK((half * half - a).norm() <= 1e-12);
  const MatrixXcd p1 = matrix_power(a, cplx(1.3, 0.4)), p2 = matrix_power(a, cplx(0.7, -0.4));
  CHECK((p1 * p2 - a * a).norm() <= 1e-11);
  const MatrixXcd unitary = matrix_power(a, cplx(0.0, 2.0));
  CHECK((unitary * unitary.adjoint() - MatrixXcd::Identity(8, 8)).norm() <= 1e-11);

  const MatrixXcd singular = diag({0.0, 4.0});
  const MatrixXcd r = matrix_power(singular, 0.5);
  CHECK(r(0, 0) == cplx(0.0));
  CHECK_THAT(r(1, 1).real(), WithinRel(2.0, 1e-15));
  CHECK_THROWS_AS(matrix_power(diag({-1.0, 1.0}), 0.5), std::domain_error);
  CHECK_THROWS_AS(matrix_power(singular, -0.5), std::domain_error);
}

TEST_CASE("positive and negative parts") {
  const auto pn = pos_neg_parts(diag({-1.0, 2.0}));
  CHECK((pn.plus - diag({0.0, 2.0})).norm() <= 1e-15);
  CHECK((pn.minus - diag({1.0, 0.0})).norm() <= 1e-15);
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const MatrixXcd s = random_hermitian(rng, 10), t = random_hermitian(rng, 10);
    const auto ps = pos_neg_parts(s), pt = pos_neg_parts(t);
    CHECK((ps.plus - ps.minus - s).norm() <= 1e-12);
    CHECK((ps.plus * ps.minus).norm() <= 1e-12);
    CHECK((pos_neg_parts(MatrixXcd(-s)).plus - ps.minus).norm() <= 1e-12);
    // the positive part is 1-Lipschitz in operator norm
    CHECK(operator_norm(ps.plus - pt.plus) <= operator_norm(s - t) * (1.0 + 1e-12));
  }
}

TEST_CASE("eigenvalue counting: inertia and eigensolve paths agree") {
  CHECK(count_below(diag({-1.0, 0.0, 2.0}), 0.0).count == 1);
  CHECK(count_below(diag({-1.0, 0.0, 2.0}), 0.0).tie);
  CHECK(count_below(diag({-1.0, 0.5, 2.0}), 10.0).count == 3);
  CHECK(count_above(diag({-1.0, 0.5, 2.0}), 0.0).count == 2);
  const auto in = inertia(diag({-1.0, 0.0, 2.0, 3.0}));
  CHECK(in.negative == 1);
  CHECK(in.zero == 1);
  CHECK(in.positive == 2);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 1 + rep % 40;
    const MatrixXcd h = random_hermitian(rng, n);
    const double lambda = u(rng);
    const auto a = count_below(h, lambda, CountMethod::inertia);
    const auto b = count_below(h, lambda, CountMethod::eigen);
    if (!a.tie && !b.tie) CHECK(a.count == b.count);
    const auto c = count_above(h, lambda, CountMethod::inertia);
    const auto d = count_above(h, lambda, CountMethod::eigen);
    if (!c.tie && !d.tie) CHECK(c.count == d.count);
  }
}

TEST_CASE("counting on block-structured sparse operators") {
  std::mt19937_64 rng(5);
  const MatrixXcd a = random_hermitian(rng, 5), b = random_hermitian(rng, 4);
  MatrixXcd full = MatrixXcd::Zero(9, 9);
  full.topLeftCorner(5, 5) = a;
  full.bottomRightCorner(4, 4) = b;
  const auto op = HermitianOperator::from_sparse(full.sparseView());
  const auto blocks = connected_blocks(op.sparse());
  CHECK(blocks.size() == 2);
  CHECK(count_below(op, 0.1).count == count_below(full, 0.1, CountMethod::eigen).count);
  auto ev = eigenvalues(op);
  const auto ref = eigenvalues_hermitian(full);
  for (Index k = 0; k < ref.size(); ++k) CHECK_THAT(ev[static_cast<std::size_t>(k)], WithinAbs(ref(k), 1e-12));
}

TEST_CASE("weak Schatten, Lorentz and trace norms") {
  std::vector<double> harmonic(200), cube(200);
  for (std::size_t k = 0; k < harmonic.size(); ++k) {
    harmonic[k] = 1.0 / static_cast<double>(k + 1);
    cube[k] = std::pow(harmonic[k], 3);
  }
  CHECK_THAT(weak_quasinorm(seq(harmonic), 1.0), WithinRel(1.0, 1e-15));
  CHECK_THAT(weak_quasinorm(seq(cube), 1.0 / 3.0), WithinRel(1.0, 1e-14));
  CHECK(weak_quasinorm(seq({2.0, 2.0, 2.0, 0.0}), 1.0) <= 3 * 2.0);

  CHECK(lorentz_p1_norm(seq({3.0}), 2.0) == 3.0);
  double expect = 0.0;
  for (int n = 0; n < 9; ++n) expect += 1.0 / std::sqrt(n + 1.0);
  CHECK_THAT(lorentz_p1_norm(seq(std::vector<double>(9, 1.0)), 2.0), WithinRel(expect, 1e-14));
  CHECK_THAT(lorentz_p1_norm(seq({2.5, 1.0}), 3.0), WithinRel(2.5 + std::pow(2.0, -2.0 / 3.0), 1e-14));
  CHECK_THROWS_AS(lorentz_p1_norm(seq({1.0}), 1.0), std::invalid_argument);

  CHECK_THAT(trace_norm(diag({1.0, -2.0})), WithinRel(3.0, 1e-15));
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const MatrixXcd s = random_hermitian(rng, 9), t = random_hermitian(rng, 9);
    CHECK(trace_norm(s + t) <= (trace_norm(s) + trace_norm(t)) * (1.0 + 1e-12));
    const MatrixXcd u = matrix_power(random_psd(rng, 9), cplx(0.0, 1.0));
    CHECK_THAT(trace_norm(u * s * u.adjoint()), WithinRel(trace_norm(s), 1e-11));
    CHECK_THAT(weak_quasinorm(singular_values(MatrixXcd(3.0 * s)), 2.0),
               WithinRel(3.0 * weak_quasinorm(singular_values(s), 2.0), 1e-13));
  }
}

TEST_CASE("Holder-type inequality, subadditivity and shared spectra on random instances") {
  Config cfg;
  cfg.set("experiment.kind", "norms");
  cfg.set("random.instances", "200");
  cfg.set("random.dim_min", "30");
  cfg.set("random.dim_max", "30");
  RunContext ctx;
  const auto rec = run_norms(cfg, ctx);
  INFO(rec.diagnostics.dump());
  CHECK(rec.passed);
  CHECK(rec.observables.at(0).observed <= 1.0);
  CHECK(rec.observables.at(1).observed == 0.0);
  CHECK(rec.observables.at(2).observed <= 1e-9);
}

TEST_CASE("jumps of h^q N(h) and t mu(t)^q take the same values") {
  // For a finite positive diagonal S, h -> h^q count_above(S, h) evaluated just below
  // each distinct eigenvalue s_k equals (k+1) mu(k, S_+)^q at the last rank with that value.
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> level(-3, 6);
  for (int rep = 0; rep < 50; ++rep) {
    const double q = 1.0 + rep % 3;
    VectorXcd d(12);
    for (Index k = 0; k < 12; ++k) d(k) = 0.5 * level(rng);
    const MatrixXcd s = d.asDiagonal();
    const auto plus = singular_values(pos_neg_parts(s).plus);
    std::vector<double> lhs, rhs;
    for (std::size_t k = 0; k < plus.size(); ++k) {
      if (plus[k] <= 0.0) break;
      if (k + 1 < plus.size() && plus[k + 1] == plus[k]) continue;
      rhs.push_back(static_cast<double>(k + 1) * std::pow(plus[k], q));
      const double h = plus[k];
      lhs.push_back(std::pow(h, q) * static_cast<double>(count_above(s, h * (1.0 - 1e-9)).count));
    }
    REQUIRE(lhs.size() == rhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) CHECK_THAT(lhs[i], WithinRel(rhs[i], 1e-8));
  }
}
