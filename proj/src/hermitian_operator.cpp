#include "nct/hermitian_operator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nct {

namespace {

constexpr double kHermitianTolerance = 1e-12;

}  // namespace

HermitianOperator HermitianOperator::from_dense(MatrixXcd m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("HermitianOperator: matrix must be square");
  HermitianOperator op;
  op.storage_ = Storage::dense;
  op.dim_ = m.rows();
  op.dense_ = std::move(m);
  op.classify();
  return op;
}

HermitianOperator HermitianOperator::from_diagonal(VectorXcd d) {
  HermitianOperator op;
  op.storage_ = Storage::diagonal;
  op.dim_ = d.size();
  op.diag_ = std::move(d);
  op.classify();
  return op;
}

HermitianOperator HermitianOperator::from_sparse(SparseXcd m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("HermitianOperator: matrix must be square");
  HermitianOperator op;
  op.storage_ = Storage::sparse;
  op.dim_ = m.rows();
  m.makeCompressed();
  op.sparse_ = std::move(m);
  op.classify();
  return op;
}

void HermitianOperator::classify() {
  const double scale = norm_bound();
  switch (storage_) {
    case Storage::diagonal:
      diagonal_ = true;
      hermitian_ = (diag_.imag().array() == 0.0).all();
      break;
    case Storage::dense: {
      double asym = 0.0;
      bool diag = true;
      for (Index j = 0; j < dim_; ++j)
        for (Index i = 0; i < dim_; ++i) {
          asym = std::max(asym, std::abs(dense_(i, j) - std::conj(dense_(j, i))));
          if (i != j && dense_(i, j) != cplx{}) diag = false;
        }
      hermitian_ = asym <= kHermitianTolerance * scale;
      diagonal_ = diag;
      break;
    }
    case Storage::sparse: {
      const SparseXcd adj = sparse_.adjoint();
      double asym = 0.0;
      const SparseXcd diff = sparse_ - adj;
      for (Index k = 0; k < diff.outerSize(); ++k)
        for (SparseXcd::InnerIterator it(diff, k); it; ++it) asym = std::max(asym, std::abs(it.value()));
      hermitian_ = asym <= kHermitianTolerance * scale;
      diagonal_ = true;
      for (Index k = 0; k < sparse_.outerSize() && diagonal_; ++k)
        for (SparseXcd::InnerIterator it(sparse_, k); it; ++it)
          if (it.row() != it.col() && it.value() != cplx{}) {
            diagonal_ = false;
            break;
          }
      break;
    }
  }
}

const MatrixXcd& HermitianOperator::dense() const {
  if (storage_ != Storage::dense) throw std::logic_error("HermitianOperator: not dense storage");
  return dense_;
}

const VectorXcd& HermitianOperator::diagonal_entries() const {
  if (storage_ != Storage::diagonal) throw std::logic_error("HermitianOperator: not diagonal storage");
  return diag_;
}

const SparseXcd& HermitianOperator::sparse() const {
  if (storage_ != Storage::sparse) throw std::logic_error("HermitianOperator: not sparse storage");
  return sparse_;
}

MatrixXcd HermitianOperator::to_dense() const {
  switch (storage_) {
    case Storage::dense:
      return dense_;
    case Storage::diagonal:
      return diag_.asDiagonal();
    case Storage::sparse:
      return MatrixXcd(sparse_);
  }
  return {};
}

SparseXcd HermitianOperator::to_sparse() const {
  switch (storage_) {
    case Storage::dense:
      return dense_.sparseView(0.0, 0.0);
    case Storage::diagonal: {
      SparseXcd s(dim_, dim_);
      s.reserve(Eigen::VectorXi::Constant(dim_, 1));
      for (Index i = 0; i < dim_; ++i)
        if (diag_(i) != cplx{}) s.insert(i, i) = diag_(i);
      s.makeCompressed();
      return s;
    }
    case Storage::sparse:
      return sparse_;
  }
  return {};
}

double HermitianOperator::norm_bound() const {
  switch (storage_) {
    case Storage::dense:
      return dim_ == 0 ? 0.0 : dense_.cwiseAbs().rowwise().sum().maxCoeff();
    case Storage::diagonal:
      return dim_ == 0 ? 0.0 : diag_.cwiseAbs().maxCoeff();
    case Storage::sparse: {
      VectorXd rows = VectorXd::Zero(dim_);
      for (Index k = 0; k < sparse_.outerSize(); ++k)
        for (SparseXcd::InnerIterator it(sparse_, k); it; ++it) rows(it.row()) += std::abs(it.value());
      return dim_ == 0 ? 0.0 : rows.maxCoeff();
    }
  }
  return 0.0;
}

HermitianOperator HermitianOperator::shifted(double lambda) const {
  switch (storage_) {
    case Storage::dense: {
      MatrixXcd m = dense_;
      m.diagonal().array() -= lambda;
      return from_dense(std::move(m));
    }
    case Storage::diagonal: {
      VectorXcd d = diag_;
      d.array() -= lambda;
      return from_diagonal(std::move(d));
    }
    case Storage::sparse: {
      SparseXcd id(dim_, dim_);
      id.setIdentity();
      return from_sparse(sparse_ - cplx(lambda) * id);
    }
  }
  return {};
}

HermitianOperator HermitianOperator::scaled(double c) const {
  switch (storage_) {
    case Storage::dense:
      return from_dense(dense_ * c);
    case Storage::diagonal:
      return from_diagonal(diag_ * c);
    case Storage::sparse:
      return from_sparse(sparse_ * cplx(c));
  }
  return {};
}

}  // namespace nct
