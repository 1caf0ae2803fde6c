#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "nct/zeta.hpp"

using namespace nct;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

SingularValueSequence seq_from(std::size_t n, const std::function<double(std::size_t)>& f) {
  SingularValueSequence s;
  s.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) s.values[k] = f(k);
  return s;
}

}  // namespace

TEST_CASE("sphere volumes and the complex gamma function") {
  CHECK(sphere_volume(1) == 2.0);
  CHECK_THAT(sphere_volume(2), WithinRel(2.0 * pi, 1e-15));
  CHECK_THAT(sphere_volume(3), WithinRel(4.0 * pi, 1e-15));
  CHECK_THAT(sphere_volume(4), WithinRel(2.0 * pi * pi, 1e-15));
  for (double x : {0.5, 1.0, 2.5, 7.0, 20.0, -0.5, -3.5})
    CHECK_THAT(gamma_complex(x).real(), WithinRel(std::tgamma(x), 1e-13));
  // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y)
  for (double y : {0.3, 2.0, 5.0})
    CHECK_THAT(std::norm(gamma_complex({0.5, y})), WithinRel(pi / std::cosh(pi * y), 1e-12));
}

TEST_CASE("lattice zeta in one dimension matches the closed form") {
  // sum_n (1 + n^2)^{-2} = (pi coth(pi) + pi^2 csch^2(pi)) / 2
  const double closed = 0.5 * (pi / std::tanh(pi) + pi * pi / std::pow(std::sinh(pi), 2));
  CHECK_THAT(lattice_zeta(1, 4.0).real(), WithinRel(closed, 1e-13));
  // sum_n (1 + n^2)^{-1} = pi coth(pi)
  CHECK_THAT(lattice_zeta(1, 2.0).real(), WithinRel(pi / std::tanh(pi), 1e-12));
}

TEST_CASE("theta evaluation sits inside the rigorous bracket of the direct sum") {
  for (const cplx z : {cplx(6.0), cplx(4.5, 2.0), cplx(3.3)}) {
    const auto direct = lattice_zeta_direct(3, z, 40);
    const auto fast = lattice_zeta_detail(3, z);
    INFO("z = " << z);
    CHECK(std::abs(fast.value - direct.value) <= direct.tail_bound + fast.error_estimate);
    CHECK(direct.tail_bound == lattice_zeta_tail_bound(3, z, 40));
  }
  CHECK_THAT(lattice_zeta(3, 40.0).real(), WithinAbs(1.0 + 6.0 * std::pow(2.0, -20.0), 1e-8));
  CHECK_THROWS_AS(lattice_zeta(3, 2.9), std::domain_error);
}

TEST_CASE("residue extraction") {
  const auto simple = residue_at([](double z) { return 3.0 / (z - 2.0); }, 2.0);
  CHECK_THAT(simple.residue, WithinRel(3.0, 1e-12));
  CHECK(simple.converged);
  const auto shifted = residue_at([](double z) { return 3.0 / (z - 2.0) + 7.0 + std::sin(z); }, 2.0);
  CHECK_THAT(shifted.residue, WithinRel(3.0, 1e-6));
  CHECK(shifted.samples.size() == 5);
  CHECK_THROWS_AS(residue_at([](double z) { return z; }, 1.0, {0.1, 0.05}), std::invalid_argument);
  CHECK_THROWS_AS(residue_at([](double z) { return z; }, 1.0, {0.1, 0.05, 0.02}), std::invalid_argument);
}

TEST_CASE("lattice zeta residues equal sphere volumes") {
  for (int d = 2; d <= 4; ++d) {
    const auto r = residue_at([d](double z) { return lattice_zeta(d, z).real(); }, d);
    INFO("d = " << d);
    CHECK_THAT(r.residue, WithinRel(sphere_volume(d), 1e-3));
    CHECK(r.converged);
  }
}

TEST_CASE("torus zeta of the unit and of multiples") {
  const auto th = ThetaMatrix::single_block(3, std::sqrt(0.5));
  const TruncationLattice lat(3, 6);
  const auto one = FourierElement::constant(th, 1.0);
  CHECK(std::abs(torus_zeta(one, 5.0, lat) - lattice_zeta(3, 5.0)) <= 1e-12);
  const auto two = FourierElement::constant(th, 2.0);
  CHECK(std::abs(torus_zeta(two, 5.0, lat) - 32.0 * lattice_zeta(3, 5.0)) <= 1e-9);
  CHECK_THROWS_AS(torus_zeta(FourierElement::constant(th, -1.0), 5.0, lat), std::domain_error);
}

TEST_CASE("limit estimator on synthetic sequences") {
  const auto exact = seq_from(4096, [](std::size_t k) { return 2.5 / static_cast<double>(k + 1); });
  const auto e = limit_t_mu(exact, 4096);
  CHECK_THAT(e.estimate, WithinRel(2.5, 1e-14));
  CHECK(e.spread <= 1e-13);
  CHECK(e.windows.size() == 12);
  CHECK(e.windows.front().lo == 0);
  CHECK(e.windows.front().hi == 1);
  CHECK(e.windows[3].lo == 7);
  CHECK(e.windows[3].hi == 15);

  // (k+1) mu(k) = c + 1/(k+1): the estimate approaches c like 1/cutoff
  const auto slow = seq_from(8192, [](std::size_t k) {
    const double n = static_cast<double>(k + 1);
    return (1.0 + 1.0 / n) / n;
  });
  const double err_small = std::abs(limit_t_mu(slow, 1024).estimate - 1.0);
  const double err_large = std::abs(limit_t_mu(slow, 8192).estimate - 1.0);
  CHECK(err_large < err_small);
  CHECK(err_large <= 2.0 / 8192 * 2.0);

  CHECK_THROWS_AS(limit_t_mu(exact, 2), std::invalid_argument);
  CHECK(trusted_rank_cutoff(1000) == 250);
  CHECK(trusted_rank_cutoff(1000, 0.5) == 500);
}

TEST_CASE("dyadic means") {
  const auto zero = seq_from(1 << 16, [](std::size_t) { return 0.0; });
  for (double v : dyadic_means(zero, 10, {0, 1, 2})) CHECK(v == 0.0);
  const auto harmonic = seq_from(1 << 16, [](std::size_t k) { return 1.0 / static_cast<double>(k + 1); });
  const auto m = dyadic_means(harmonic, 10, {0, 2, 4});
  REQUIRE(m.size() == 3);
  for (double v : m) CHECK_THAT(v, WithinAbs(std::log(2.0), 0.05));
  CHECK_THROWS_AS(dyadic_means(harmonic, 20, {0}), std::length_error);
}

TEST_CASE("Wiener-Ikehara prediction and the residue of a power sequence") {
  CHECK(wiener_ikehara_predict(6.0, 3.0) == 2.0);
  // mu(k, T) = (c/(k+1))^{1/p}: Tr(T^z) = c^{z/p} zeta(z/p) has residue p c at z = p,
  // and (k+1) mu(k, T^p) = c, so c/p applied to the residue gives c back.
  const double c = 1.7, p = 3.0;
  const auto res = residue_at(
      [&](double z) {
        double acc = 0.0;
        // partial sum plus the integral tail, accurate near z = p
        const int n = 200000;
        for (int k = 1; k <= n; ++k) acc += std::pow(c / k, z / p);
        const double s = z / p;
        acc += std::pow(c, s) * std::pow(n + 0.5, 1.0 - s) / (s - 1.0);
        return acc;
      },
      p, {0.32, 0.16, 0.08, 0.04, 0.02});
  CHECK_THAT(res.residue, WithinRel(p * c, 1e-3));
  CHECK_THAT(wiener_ikehara_predict(res.residue, p), WithinRel(c, 1e-3));
}

TEST_CASE("t mu CSV") {
  const auto path = std::filesystem::temp_directory_path() / "nct_tmu.csv";
  write_t_mu_csv(seq_from(3, [](std::size_t k) { return 1.0 / (k + 1.0); }), path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "k,t_mu");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
  std::filesystem::remove(path);
}
