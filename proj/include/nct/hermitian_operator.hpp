#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace nct {

using cplx = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using SparseXcd = Eigen::SparseMatrix<cplx>;

/// Square complex matrix tagged with its Hermitian/diagonal structure.
///
/// Three storages: dense, diagonal-only (the fast path for Fourier
/// multipliers) and sparse (banded lattice operators, which the spectral
/// routines split into independent blocks). The hermitian flag is computed
/// on construction: max |M - M^H| <= 1e-12 * ||M||.
class HermitianOperator {
 public:
  enum class Storage { dense, diagonal, sparse };

  HermitianOperator() = default;
  static HermitianOperator from_dense(MatrixXcd m);
  static HermitianOperator from_diagonal(VectorXcd d);
  static HermitianOperator from_sparse(SparseXcd m);

  Index dim() const { return dim_; }
  Storage storage() const { return storage_; }
  bool hermitian() const { return hermitian_; }
  /// True when every off-diagonal entry is exactly zero.
  bool diagonal() const { return diagonal_; }

  const MatrixXcd& dense() const;
  const VectorXcd& diagonal_entries() const;
  const SparseXcd& sparse() const;

  MatrixXcd to_dense() const;
  SparseXcd to_sparse() const;

  /// Max absolute row sum; an upper bound for the operator norm.
  double norm_bound() const;
  /// M - lambda I in the same storage.
  HermitianOperator shifted(double lambda) const;
  HermitianOperator scaled(double c) const;

 private:
  void classify();

  Storage storage_ = Storage::dense;
  Index dim_ = 0;
  bool hermitian_ = true;
  bool diagonal_ = true;
  MatrixXcd dense_;
  VectorXcd diag_;
  SparseXcd sparse_;
};

}  // namespace nct
