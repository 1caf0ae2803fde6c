#include "nct/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string_view>

namespace nct::kernels {

namespace scalar {

double dot(std::span<const double> w, std::span<const double> x) {
  if (w.size() != x.size()) throw std::invalid_argument("kernels::dot: length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * x[k];
  return acc;
}

double max_product(std::span<const double> w, std::span<const double> x) {
  if (w.size() != x.size()) throw std::invalid_argument("kernels::max_product: length mismatch");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < w.size(); ++k) best = std::max(best, w[k] * x[k]);
  return best;
}

double abs_sum(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += std::abs(v);
  return acc;
}

void scale_symmetric(std::complex<double>* m, std::size_t n, std::span<const double> w) {
  if (w.size() != n) throw std::invalid_argument("kernels::scale_symmetric: length mismatch");
  for (std::size_t j = 0; j < n; ++j) {
    std::complex<double>* col = m + j * n;
    for (std::size_t i = 0; i < n; ++i) col[i] *= w[i] * w[j];
  }
}

void axpy(std::complex<double> alpha, std::span<const std::complex<double>> x,
          std::span<std::complex<double>> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernels::axpy: length mismatch");
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

}  // namespace scalar

#ifndef NCT_HAVE_AVX2
// Build without the AVX2 translation unit: the avx2 entry points exist so the
// dispatch table links, but they are never selected.
namespace avx2 {
double dot(std::span<const double> w, std::span<const double> x) { return scalar::dot(w, x); }
double max_product(std::span<const double> w, std::span<const double> x) {
  return scalar::max_product(w, x);
}
double abs_sum(std::span<const double> x) { return scalar::abs_sum(x); }
void scale_symmetric(std::complex<double>* m, std::size_t n, std::span<const double> w) {
  scalar::scale_symmetric(m, n, w);
}
void axpy(std::complex<double> alpha, std::span<const std::complex<double>> x,
          std::span<std::complex<double>> y) {
  scalar::axpy(alpha, x, y);
}
}  // namespace avx2
#endif

namespace {

bool cpu_has_avx2() {
#if defined(NCT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("NCT_FORCE_SCALAR")) {
    std::string_view v(env);
    if (!v.empty() && v != "0") return Isa::scalar;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

bool isa_available(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) throw std::invalid_argument("kernels::set_isa: instruction set unavailable");
  current().store(isa, std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

double dot(std::span<const double> w, std::span<const double> x) {
  return active_isa() == Isa::avx2 ? avx2::dot(w, x) : scalar::dot(w, x);
}

double max_product(std::span<const double> w, std::span<const double> x) {
  return active_isa() == Isa::avx2 ? avx2::max_product(w, x) : scalar::max_product(w, x);
}

double abs_sum(std::span<const double> x) {
  return active_isa() == Isa::avx2 ? avx2::abs_sum(x) : scalar::abs_sum(x);
}

void scale_symmetric(std::complex<double>* m, std::size_t n, std::span<const double> w) {
  if (active_isa() == Isa::avx2)
    avx2::scale_symmetric(m, n, w);
  else
    scalar::scale_symmetric(m, n, w);
}

void axpy(std::complex<double> alpha, std::span<const std::complex<double>> x,
          std::span<std::complex<double>> y) {
  if (active_isa() == Isa::avx2)
    avx2::axpy(alpha, x, y);
  else
    scalar::axpy(alpha, x, y);
}

}  // namespace nct::kernels
