// AVX2/FMA variants of the kernels in kernels.cpp. This translation unit is
// compiled with -mavx2 -mfma and must only be entered after the runtime check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nct/kernels.hpp"

namespace nct::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_max_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_max_sd(lo, sh));
}

}  // namespace

double dot(std::span<const double> w, std::span<const double> x) {
  if (w.size() != x.size()) throw std::invalid_argument("kernels::dot: length mismatch");
  const std::size_t n = w.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + k), _mm256_loadu_pd(x.data() + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + k + 4), _mm256_loadu_pd(x.data() + k + 4),
                           acc1);
  }
  for (; k + 4 <= n; k += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + k), _mm256_loadu_pd(x.data() + k), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += w[k] * x[k];
  return acc;
}

double max_product(std::span<const double> w, std::span<const double> x) {
  if (w.size() != x.size()) throw std::invalid_argument("kernels::max_product: length mismatch");
  const std::size_t n = w.size();
  double best = -std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  if (n >= 4) {
    __m256d vbest = _mm256_set1_pd(best);
    for (; k + 4 <= n; k += 4) {
      __m256d p = _mm256_mul_pd(_mm256_loadu_pd(w.data() + k), _mm256_loadu_pd(x.data() + k));
      vbest = _mm256_max_pd(vbest, p);
    }
    best = hmax(vbest);
  }
  for (; k < n; ++k) best = std::max(best, w[k] * x[k]);
  return best;
}

double abs_sum(std::span<const double> x) {
  const std::size_t n = x.size();
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, _mm256_loadu_pd(x.data() + k)));
  double s = hsum(acc);
  for (; k < n; ++k) s += std::abs(x[k]);
  return s;
}

void scale_symmetric(std::complex<double>* m, std::size_t n, std::span<const double> w) {
  if (w.size() != n) throw std::invalid_argument("kernels::scale_symmetric: length mismatch");
  auto* base = reinterpret_cast<double*>(m);
  for (std::size_t j = 0; j < n; ++j) {
    double* col = base + 2 * j * n;
    const __m256d wj = _mm256_set1_pd(w[j]);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      // [w_i, w_{i+1}] -> [w_i, w_i, w_{i+1}, w_{i+1}] to cover (re, im) pairs
      __m256d wi = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w.data() + i)), 0x50);
      __m256d v = _mm256_loadu_pd(col + 2 * i);
      _mm256_storeu_pd(col + 2 * i, _mm256_mul_pd(v, _mm256_mul_pd(wi, wj)));
    }
    for (; i < n; ++i) {
      const double f = w[i] * w[j];
      col[2 * i] *= f;
      col[2 * i + 1] *= f;
    }
  }
}

void axpy(std::complex<double> alpha, std::span<const std::complex<double>> x,
          std::span<std::complex<double>> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernels::axpy: length mismatch");
  const std::size_t n = x.size();
  const auto* xs = reinterpret_cast<const double*>(x.data());
  auto* ys = reinterpret_cast<double*>(y.data());
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    __m256d v = _mm256_loadu_pd(xs + 2 * k);
    __m256d swapped = _mm256_permute_pd(v, 0x5);  // (im, re) per lane pair
    // even lanes: ar*re - ai*im, odd lanes: ar*im + ai*re
    __m256d prod = _mm256_fmaddsub_pd(ar, v, _mm256_mul_pd(ai, swapped));
    _mm256_storeu_pd(ys + 2 * k, _mm256_add_pd(_mm256_loadu_pd(ys + 2 * k), prod));
  }
  for (; k < n; ++k) y[k] += alpha * x[k];
}

}  // namespace nct::kernels::avx2
