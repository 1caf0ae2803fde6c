#pragma once

// Truncations of the torus operators to the sup-norm index ball
// {n in Z^d : |n|_inf <= N}, ordered lexicographically (first coordinate
// most significant). Fourier multipliers come out diagonal, rho(a) for a
// trigonometric polynomial comes out banded (sparse storage).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "nct/hermitian_operator.hpp"
#include "nct/nc_algebra.hpp"

namespace nct {

class TruncationLattice {
 public:
  static constexpr std::size_t kDefaultMaxSize = 4'000'000;

  /// Throws std::invalid_argument for d < 1 or N < 0 and std::length_error
  /// if (2N+1)^d exceeds max_size.
  TruncationLattice(int d, int radius, std::size_t max_size = kDefaultMaxSize);

  int dim() const { return d_; }
  int radius() const { return radius_; }
  Index size() const { return size_; }

  MultiIndex index(Index pos) const;
  int coordinate(Index pos, int j) const { return coords_[static_cast<std::size_t>(pos * d_ + j)]; }
  std::optional<Index> position(const MultiIndex& n) const;
  std::int64_t norm_sq(Index pos) const;
  int sup_norm(Index pos) const;
  /// Position of n = 0.
  Index origin() const;

 private:
  int d_;
  int radius_;
  Index size_;
  std::vector<int> coords_;  // size_ * d_
};

struct GammaFamily {
  int d = 0;
  int spinor_dim = 0;  // 2^floor(d/2)
  std::vector<MatrixXcd> matrices;
};

/// Diagonal (1 + |n|^2)^{s/2}.
HermitianOperator bessel_multiplier(const TruncationLattice& lat, cplx s);
/// Diagonal |n|^2, i.e. the positive operator -Delta.
HermitianOperator laplacian(const TruncationLattice& lat);

/// Compression of left multiplication by a: entry (m, n) = a(m - n) sigma(m - n, n).
SparseXcd rho_matrix(const FourierElement& a, const TruncationLattice& lat);
MatrixXcd rho_matrix_dense(const FourierElement& a, const TruncationLattice& lat);

/// Self-adjoint anticommuting involutions built from Kronecker products of
/// Pauli matrices. Requires d >= 2.
GammaFamily gamma_family(int d);

/// D = sum_j diag(n_j) (x) gamma_j on lattice (x) spinor, row = pos * spinor_dim + alpha.
HermitianOperator dirac_matrix(const TruncationLattice& lat, const GammaFamily& gammas);

/// (1 - Delta)^{-p/4} rho_N(a) (1 - Delta)^{-p/4}; a must be self-adjoint.
HermitianOperator symmetrized_compact(const FourierElement& a, const TruncationLattice& lat, double p);

/// h^2 |n|^2 + rho_N(V) - lambda, tensored with the identity on spinors when
/// `spinor` is set (where h^2 D^2 = h^2 |n|^2 (x) I).
HermitianOperator schrodinger_matrix(const TruncationLattice& lat, double h, const FourierElement& v,
                                     double lambda, bool spinor);

/// <f(rho_N(V)) e_0, e_0>, which tends to tau(f(V)) as N grows. Only the
/// connected block of rho_N(V) containing n = 0 is diagonalised.
double tau_of_function(const FourierElement& v, const std::function<double(double)>& f,
                       const TruncationLattice& lat);
cplx tau_of_function_complex(const FourierElement& v, const std::function<cplx(double)>& f,
                             const TruncationLattice& lat);

/// Binary little-endian export with a JSON sidecar (<stem>.bin, <stem>.json).
/// Dense: column-major complex128. Diagonal: the dim diagonal entries.
/// Sparse: COO records (int64 row, int64 col, float64 re, float64 im).
void export_operator(const HermitianOperator& op, const TruncationLattice* lat, const std::filesystem::path& stem);
HermitianOperator import_operator(const std::filesystem::path& stem);

}  // namespace nct
