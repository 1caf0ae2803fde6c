#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "nct/kernels.hpp"
#include "nct/spectral.hpp"

namespace nct {

namespace {

constexpr double kTieTolerance = 1e-10;
constexpr double kNegativeTolerance = 1e-12;

void require_square(const MatrixXcd& m, const char* who) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(who) + ": matrix must be square");
}

double max_abs_row_sum(const MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

// Eigenvalues (ascending) of the dense block structure of a sparse operator,
// invoking `solve` on each block.
template <class Fn>
void for_each_block(const SparseXcd& m, Fn&& solve) {
  for (const auto& block : connected_blocks(m)) {
    if (block.size() == 1) {
      MatrixXcd one(1, 1);
      one(0, 0) = m.coeff(block[0], block[0]);
      solve(one);
    } else {
      solve(extract_block(m, block));
    }
  }
}

CountResult count_sorted(const std::vector<double>& ascending, double lambda, double delta) {
  CountResult r;
  r.count = static_cast<Index>(std::lower_bound(ascending.begin(), ascending.end(), lambda) - ascending.begin());
  auto lo = std::lower_bound(ascending.begin(), ascending.end(), lambda - delta);
  r.tie = lo != ascending.end() && *lo <= lambda + delta;
  return r;
}

CountResult count_below_dense(const MatrixXcd& m, double lambda, CountMethod method, double delta) {
  if (method == CountMethod::eigen) {
    const VectorXd ev = eigenvalues_hermitian(m);
    return count_sorted(std::vector<double>(ev.data(), ev.data() + ev.size()), lambda, delta);
  }
  MatrixXcd shifted = m;
  shifted.diagonal().array() -= (lambda - delta);
  const Index below_lo = inertia(shifted).negative;
  shifted.diagonal().array() -= 2.0 * delta;
  const Inertia at_hi = inertia(shifted);
  if (below_lo == at_hi.negative) return {below_lo, false};
  // An eigenvalue sits in [lambda - delta, lambda + delta): resolve exactly.
  CountResult r = count_below_dense(m, lambda, CountMethod::eigen, delta);
  r.tie = true;
  return r;
}

}  // namespace

double SingularValueSequence::at(double t) const {
  if (t < 0.0) throw std::invalid_argument("SingularValueSequence::at: t must be nonnegative");
  const auto k = static_cast<std::size_t>(std::floor(t));
  return k < values.size() ? values[k] : 0.0;
}

void SingularValueSequence::validate() const {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] >= 0.0)) throw std::invalid_argument("SingularValueSequence: negative entry");
    if (k > 0 && values[k] > values[k - 1]) throw std::invalid_argument("SingularValueSequence: not nonincreasing");
  }
}

SpectralData eig_hermitian(const MatrixXcd& m) {
  require_square(m, "eig_hermitian");
  SpectralData out;
  const auto n = static_cast<lapack_int>(m.rows());
  out.eigenvectors = m;
  out.eigenvalues.resize(n);
  if (n == 0) return out;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.eigenvectors.data(), n,
                                         out.eigenvalues.data());
  if (info > 0) throw ConvergenceError("eig_hermitian: zheevd failed to converge");
  if (info < 0) throw std::invalid_argument("eig_hermitian: invalid argument to zheevd");
  return out;
}

VectorXd eigenvalues_hermitian(const MatrixXcd& m) {
  require_square(m, "eigenvalues_hermitian");
  const auto n = static_cast<lapack_int>(m.rows());
  VectorXd w(n);
  if (n == 0) return w;
  MatrixXcd a = m;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
  if (info > 0) throw ConvergenceError("eigenvalues_hermitian: zheevd failed to converge");
  if (info < 0) throw std::invalid_argument("eigenvalues_hermitian: invalid argument to zheevd");
  return w;
}

std::vector<double> eigenvalues(const HermitianOperator& op) {
  if (!op.hermitian()) throw std::invalid_argument("eigenvalues: operator is not Hermitian");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(op.dim()));
  switch (op.storage()) {
    case HermitianOperator::Storage::diagonal: {
      const VectorXcd& d = op.diagonal_entries();
      for (Index i = 0; i < d.size(); ++i) out.push_back(d(i).real());
      break;
    }
    case HermitianOperator::Storage::dense: {
      const VectorXd ev = eigenvalues_hermitian(op.dense());
      out.assign(ev.data(), ev.data() + ev.size());
      break;
    }
    case HermitianOperator::Storage::sparse:
      for_each_block(op.sparse(), [&](const MatrixXcd& block) {
        if (block.rows() == 1) {
          out.push_back(block(0, 0).real());
          return;
        }
        const VectorXd ev = eigenvalues_hermitian(block);
        out.insert(out.end(), ev.data(), ev.data() + ev.size());
      });
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

SingularValueSequence singular_values(const MatrixXcd& m) {
  SingularValueSequence s;
  s.source = "dense " + std::to_string(m.rows()) + "x" + std::to_string(m.cols());
  const auto rows = static_cast<lapack_int>(m.rows());
  const auto cols = static_cast<lapack_int>(m.cols());
  const lapack_int k = std::min(rows, cols);
  if (k == 0) return s;
  MatrixXcd a = m;
  s.values.resize(static_cast<std::size_t>(k));
  const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, a.data(), rows, s.values.data(),
                                         nullptr, 1, nullptr, 1);
  if (info > 0) throw ConvergenceError("singular_values: zgesdd failed to converge");
  if (info < 0) throw std::invalid_argument("singular_values: invalid argument to zgesdd");
  std::sort(s.values.begin(), s.values.end(), std::greater<>());
  return s;
}

SingularValueSequence singular_values(const HermitianOperator& op) {
  SingularValueSequence s;
  s.source = "hermitian operator dim " + std::to_string(op.dim());
  if (!op.hermitian()) {
    SingularValueSequence dense = singular_values(op.to_dense());
    dense.source = s.source;
    return dense;
  }
  s.values = eigenvalues(op);
  for (double& v : s.values) v = std::abs(v);
  std::sort(s.values.begin(), s.values.end(), std::greater<>());
  return s;
}

double zero_tolerance(const SpectralData& psd) {
  const Index n = psd.eigenvalues.size();
  if (n == 0) return 0.0;
  const double scale = psd.eigenvalues.cwiseAbs().maxCoeff();
  return static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
}

MatrixXcd matrix_power(const SpectralData& psd, cplx z) {
  const Index n = psd.eigenvalues.size();
  if (n == 0) return MatrixXcd(0, 0);
  const double scale = psd.eigenvalues.cwiseAbs().maxCoeff();
  const double zero_tol = zero_tolerance(psd);
  VectorXcd d(n);
  for (Index k = 0; k < n; ++k) {
    const double lam = psd.eigenvalues(k);
    if (lam < -kNegativeTolerance * scale)
      throw std::domain_error("matrix_power: matrix is not positive semidefinite");
    if (lam <= zero_tol) {
      if (z.real() < 0.0) throw std::domain_error("matrix_power: singular matrix needs Re(z) >= 0");
      d(k) = 0.0;
    } else {
      d(k) = std::exp(z * std::log(lam));
    }
  }
  return psd.eigenvectors * d.asDiagonal() * psd.eigenvectors.adjoint();
}

MatrixXcd matrix_power(const MatrixXcd& m, cplx z) { return matrix_power(eig_hermitian(m), z); }

PosNegParts pos_neg_parts(const MatrixXcd& m) {
  const SpectralData sd = eig_hermitian(m);
  const Index n = sd.eigenvalues.size();
  VectorXd plus(n), minus(n);
  for (Index k = 0; k < n; ++k) {
    plus(k) = std::max(sd.eigenvalues(k), 0.0);
    minus(k) = std::max(-sd.eigenvalues(k), 0.0);
  }
  const MatrixXcd& q = sd.eigenvectors;
  return {q * plus.asDiagonal() * q.adjoint(), q * minus.asDiagonal() * q.adjoint()};
}

Inertia inertia(const MatrixXcd& m) {
  require_square(m, "inertia");
  const auto n = static_cast<lapack_int>(m.rows());
  Inertia out;
  if (n == 0) return out;
  MatrixXcd a = m;
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zhetrf(LAPACK_COL_MAJOR, 'L', n, a.data(), n, ipiv.data());
  if (info < 0) throw std::invalid_argument("inertia: invalid argument to zhetrf");
  // info > 0 only reports an exactly zero pivot; D is still complete.
  for (lapack_int k = 0; k < n;) {
    if (ipiv[static_cast<std::size_t>(k)] > 0) {
      const double dk = a(k, k).real();
      if (dk < 0.0)
        ++out.negative;
      else if (dk > 0.0)
        ++out.positive;
      else
        ++out.zero;
      k += 1;
    } else {
      const double p = a(k, k).real();
      const double r = a(k + 1, k + 1).real();
      const double det = p * r - std::norm(a(k + 1, k));
      if (det < 0.0) {
        ++out.negative;
        ++out.positive;
      } else if (det > 0.0) {
        (p + r < 0.0 ? out.negative : out.positive) += 2;
      } else {
        ++out.zero;
        if (p + r < 0.0)
          ++out.negative;
        else if (p + r > 0.0)
          ++out.positive;
        else
          ++out.zero;
      }
      k += 2;
    }
  }
  return out;
}

CountResult count_below(const MatrixXcd& m, double lambda, CountMethod method) {
  require_square(m, "count_below");
  const double delta = kTieTolerance * std::max(max_abs_row_sum(m), std::numeric_limits<double>::min());
  return count_below_dense(m, lambda, method, delta);
}

CountResult count_below(const HermitianOperator& op, double lambda, CountMethod method) {
  if (!op.hermitian()) throw std::invalid_argument("count_below: operator is not Hermitian");
  const double delta = kTieTolerance * std::max(op.norm_bound(), std::numeric_limits<double>::min());
  switch (op.storage()) {
    case HermitianOperator::Storage::dense:
      return count_below_dense(op.dense(), lambda, method, delta);
    case HermitianOperator::Storage::diagonal: {
      std::vector<double> ev = eigenvalues(op);
      return count_sorted(ev, lambda, delta);
    }
    case HermitianOperator::Storage::sparse: {
      CountResult total;
      for_each_block(op.sparse(), [&](const MatrixXcd& block) {
        CountResult r;
        if (block.rows() == 1) {
          const double v = block(0, 0).real();
          r.count = v < lambda ? 1 : 0;
          r.tie = std::abs(v - lambda) <= delta;
        } else {
          r = count_below_dense(block, lambda, method, delta);
        }
        total.count += r.count;
        total.tie = total.tie || r.tie;
      });
      return total;
    }
  }
  return {};
}

CountResult count_above(const MatrixXcd& m, double s, CountMethod method) {
  return count_below(MatrixXcd(-m), -s, method);
}

CountResult count_above(const HermitianOperator& op, double s, CountMethod method) {
  return count_below(op.scaled(-1.0), -s, method);
}

double weak_quasinorm(const SingularValueSequence& s, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("weak_quasinorm: p must be positive");
  if (s.values.empty()) return 0.0;
  std::vector<double> w(s.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::pow(static_cast<double>(k + 1), 1.0 / p);
  return kernels::max_product(w, s.values);
}

double lorentz_p1_norm(const SingularValueSequence& s, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("lorentz_p1_norm: p must exceed 1");
  std::vector<double> w(s.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::pow(static_cast<double>(k + 1), 1.0 / p - 1.0);
  return kernels::dot(w, s.values);
}

double trace_norm(const MatrixXcd& m) { return kernels::abs_sum(singular_values(m).values); }

double operator_norm(const MatrixXcd& m) {
  const SingularValueSequence s = singular_values(m);
  return s.values.empty() ? 0.0 : s.values.front();
}

std::vector<std::vector<Index>> connected_blocks(const SparseXcd& m) {
  const Index n = m.rows();
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& px = parent[static_cast<std::size_t>(x)];
      px = parent[static_cast<std::size_t>(px)];
      x = px;
    }
    return x;
  };
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseXcd::InnerIterator it(m, k); it; ++it) {
      if (it.value() == cplx{}) continue;
      const Index a = find(it.row());
      const Index b = find(it.col());
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
  std::vector<Index> slot(static_cast<std::size_t>(n), -1);
  std::vector<std::vector<Index>> blocks;
  for (Index i = 0; i < n; ++i) {
    const Index root = find(i);
    auto& s = slot[static_cast<std::size_t>(root)];
    if (s < 0) {
      s = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[static_cast<std::size_t>(s)].push_back(i);
  }
  return blocks;
}

MatrixXcd extract_block(const SparseXcd& m, const std::vector<Index>& indices) {
  const auto n = static_cast<Index>(indices.size());
  MatrixXcd out = MatrixXcd::Zero(n, n);
  if (n == 0) return out;
  // indices are sorted, so positions can be found by binary search
  auto local = [&](Index global) -> Index {
    auto it = std::lower_bound(indices.begin(), indices.end(), global);
    return (it != indices.end() && *it == global) ? static_cast<Index>(it - indices.begin()) : -1;
  };
  for (Index jl = 0; jl < n; ++jl) {
    const Index j = indices[static_cast<std::size_t>(jl)];
    if (!m.IsRowMajor) {
      for (SparseXcd::InnerIterator it(m, j); it; ++it) {
        const Index il = local(it.row());
        if (il >= 0) out(il, jl) = it.value();
      }
    }
  }
  return out;
}

void write_csv(const SingularValueSequence& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  out << "rank,value\n";
  out.precision(17);
  for (std::size_t k = 0; k < s.size(); ++k) out << k << ',' << s.values[k] << '\n';
}

}  // namespace nct
