#pragma once

// Dense Hermitian linear algebra: eigendecomposition, singular values,
// complex powers of positive matrices, eigenvalue counting and the
// singular-value norms (weak Schatten, Lorentz (p,1), trace norm).
//
// Eigensolves and factorizations are LAPACK (zheevd, zhetrf, zgesdd).
// Sparse HermitianOperators are split into connected components of their
// sparsity graph and each component is handled densely.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "nct/hermitian_operator.hpp"

namespace nct {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpectralData {
  VectorXd eigenvalues;   // ascending
  MatrixXcd eigenvectors;  // columns, unitary
};

/// mu(0) >= mu(1) >= ... >= 0 with a free-form description of its origin.
struct SingularValueSequence {
  std::vector<double> values;
  std::string source;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
  /// mu(t) := mu(floor(t)), zero past the end.
  double at(double t) const;
  /// Throws std::invalid_argument unless nonincreasing and nonnegative.
  void validate() const;
};

SpectralData eig_hermitian(const MatrixXcd& m);
VectorXd eigenvalues_hermitian(const MatrixXcd& m);
/// All eigenvalues (ascending) of any storage; sparse operators are solved blockwise.
std::vector<double> eigenvalues(const HermitianOperator& op);

SingularValueSequence singular_values(const MatrixXcd& m);
/// For Hermitian operators: |eigenvalues| sorted nonincreasing.
SingularValueSequence singular_values(const HermitianOperator& op);

/// Q diag(lambda^z) Q^H for positive semidefinite M. Eigenvalues at or below
/// zero_tolerance(M) are treated as exact zeros with 0^z := 0, which needs
/// Re(z) >= 0 (Re(z) = 0 gives the partial isometry onto the range).
/// Throws std::domain_error for eigenvalues below -1e-12 ||M||.
MatrixXcd matrix_power(const MatrixXcd& m, cplx z);
MatrixXcd matrix_power(const SpectralData& psd, cplx z);
/// Rank threshold used by matrix_power.
double zero_tolerance(const SpectralData& psd);

struct PosNegParts {
  MatrixXcd plus;
  MatrixXcd minus;
};
/// M = plus - minus with plus, minus >= 0 and plus * minus = 0.
PosNegParts pos_neg_parts(const MatrixXcd& m);

struct Inertia {
  Index negative = 0;
  Index zero = 0;
  Index positive = 0;
};
/// Sylvester inertia from a Bunch-Kaufman factorization (zhetrf).
Inertia inertia(const MatrixXcd& m);

enum class CountMethod { inertia, eigen };

struct CountResult {
  Index count = 0;
  /// Some eigenvalue lies within 1e-10 ||M|| of the threshold.
  bool tie = false;
};

/// Number of eigenvalues strictly below lambda.
CountResult count_below(const MatrixXcd& m, double lambda, CountMethod method = CountMethod::inertia);
CountResult count_below(const HermitianOperator& op, double lambda,
                        CountMethod method = CountMethod::inertia);
/// Number of eigenvalues strictly above s.
CountResult count_above(const MatrixXcd& m, double s, CountMethod method = CountMethod::inertia);
CountResult count_above(const HermitianOperator& op, double s,
                        CountMethod method = CountMethod::inertia);

/// sup_k (k+1)^{1/p} mu(k)
double weak_quasinorm(const SingularValueSequence& s, double p);
/// sum_k (k+1)^{1/p - 1} mu(k), p > 1
double lorentz_p1_norm(const SingularValueSequence& s, double p);
double trace_norm(const MatrixXcd& m);
double operator_norm(const MatrixXcd& m);

/// Connected components of the sparsity graph (i ~ j iff m(i,j) != 0 or
/// m(j,i) != 0). Components are ordered by their smallest index and each is
/// sorted ascending.
std::vector<std::vector<Index>> connected_blocks(const SparseXcd& m);
MatrixXcd extract_block(const SparseXcd& m, const std::vector<Index>& indices);

/// Two-column CSV "rank,value" with 17 significant digits.
void write_csv(const SingularValueSequence& s, const std::filesystem::path& path);

}  // namespace nct
