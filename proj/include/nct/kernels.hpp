#pragma once

// Data-parallel inner loops used by the assembly and norm code.
//
// Every kernel has a portable scalar reference in nct::kernels::scalar and,
// when the library is built with NCT_ENABLE_AVX2, an AVX2/FMA variant in
// nct::kernels::avx2. The unqualified entry points dispatch at runtime on
// the CPU's capabilities. Setting NCT_FORCE_SCALAR=1 in the environment pins
// the scalar path (useful for bit-for-bit comparisons across machines).

#include <complex>
#include <cstddef>
#include <span>

namespace nct::kernels {

enum class Isa { scalar, avx2 };

/// Instruction set chosen for this process.
Isa active_isa();
/// Force a particular path. Throws std::invalid_argument if the CPU or the
/// build lacks it.
void set_isa(Isa isa);
bool isa_available(Isa isa);
const char* isa_name(Isa isa);

// sum_k w[k] * x[k]
double dot(std::span<const double> w, std::span<const double> x);
// max_k w[k] * x[k]; -inf for empty input
double max_product(std::span<const double> w, std::span<const double> x);
// sum_k |x[k]|
double abs_sum(std::span<const double> x);
// m(i,j) *= w[i] * w[j] for a column-major n x n complex matrix
void scale_symmetric(std::complex<double>* m, std::size_t n, std::span<const double> w);
// y += alpha * x
void axpy(std::complex<double> alpha, std::span<const std::complex<double>> x,
          std::span<std::complex<double>> y);

namespace scalar {
double dot(std::span<const double> w, std::span<const double> x);
double max_product(std::span<const double> w, std::span<const double> x);
double abs_sum(std::span<const double> x);
void scale_symmetric(std::complex<double>* m, std::size_t n, std::span<const double> w);
void axpy(std::complex<double> alpha, std::span<const std::complex<double>> x,
          std::span<std::complex<double>> y);
}  // namespace scalar

namespace avx2 {
double dot(std::span<const double> w, std::span<const double> x);
double max_product(std::span<const double> w, std::span<const double> x);
double abs_sum(std::span<const double> x);
void scale_symmetric(std::complex<double>* m, std::size_t n, std::span<const double> w);
void axpy(std::complex<double> alpha, std::span<const std::complex<double>> x,
          std::span<std::complex<double>> y);
}  // namespace avx2

}  // namespace nct::kernels
