#include "nct/operator_assembly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "nct/kernels.hpp"
#include "nct/spectral.hpp"

namespace nct {

TruncationLattice::TruncationLattice(int d, int radius, std::size_t max_size) : d_(d), radius_(radius) {
  if (d < 1) throw std::invalid_argument("TruncationLattice: d must be at least 1");
  if (radius < 0) throw std::invalid_argument("TruncationLattice: radius must be nonnegative");
  const auto side = static_cast<std::size_t>(2 * radius + 1);
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) {
    if (total > max_size / side)
      throw std::length_error("TruncationLattice: (2N+1)^d exceeds the configured maximum size");
    total *= side;
  }
  size_ = static_cast<Index>(total);
  coords_.resize(total * static_cast<std::size_t>(d));
  std::vector<int> n(static_cast<std::size_t>(d), -radius);
  for (std::size_t pos = 0; pos < total; ++pos) {
    std::copy(n.begin(), n.end(), coords_.begin() + static_cast<std::ptrdiff_t>(pos * static_cast<std::size_t>(d)));
    for (int j = d - 1; j >= 0; --j) {
      if (++n[static_cast<std::size_t>(j)] <= radius) break;
      n[static_cast<std::size_t>(j)] = -radius;
    }
  }
}

MultiIndex TruncationLattice::index(Index pos) const {
  const auto begin = coords_.begin() + static_cast<std::ptrdiff_t>(pos * d_);
  return MultiIndex(begin, begin + d_);
}

std::optional<Index> TruncationLattice::position(const MultiIndex& n) const {
  if (static_cast<int>(n.size()) != d_) throw std::invalid_argument("TruncationLattice: index dimension mismatch");
  Index pos = 0;
  const Index side = 2 * radius_ + 1;
  for (int v : n) {
    if (v < -radius_ || v > radius_) return std::nullopt;
    pos = pos * side + (v + radius_);
  }
  return pos;
}

std::int64_t TruncationLattice::norm_sq(Index pos) const {
  std::int64_t s = 0;
  for (int j = 0; j < d_; ++j) {
    const std::int64_t v = coordinate(pos, j);
    s += v * v;
  }
  return s;
}

int TruncationLattice::sup_norm(Index pos) const {
  int s = 0;
  for (int j = 0; j < d_; ++j) s = std::max(s, std::abs(coordinate(pos, j)));
  return s;
}

Index TruncationLattice::origin() const { return *position(MultiIndex(static_cast<std::size_t>(d_), 0)); }

HermitianOperator bessel_multiplier(const TruncationLattice& lat, cplx s) {
  VectorXcd d(lat.size());
  const cplx half = 0.5 * s;
  for (Index i = 0; i < lat.size(); ++i) {
    const double base = 1.0 + static_cast<double>(lat.norm_sq(i));
    d(i) = s.imag() == 0.0 ? cplx(std::pow(base, half.real())) : std::exp(half * std::log(base));
  }
  return HermitianOperator::from_diagonal(std::move(d));
}

HermitianOperator laplacian(const TruncationLattice& lat) {
  VectorXcd d(lat.size());
  for (Index i = 0; i < lat.size(); ++i) d(i) = static_cast<double>(lat.norm_sq(i));
  return HermitianOperator::from_diagonal(std::move(d));
}

namespace {

void check_dims(const FourierElement& a, const TruncationLattice& lat, const char* who) {
  if (a.dim() != lat.dim()) throw std::invalid_argument(std::string(who) + ": element and lattice dimensions differ");
}

std::vector<Eigen::Triplet<cplx>> rho_triplets(const FourierElement& a, const TruncationLattice& lat) {
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(lat.size()) * a.coefficients().size());
  MultiIndex n, m(static_cast<std::size_t>(lat.dim()));
  for (Index col = 0; col < lat.size(); ++col) {
    n = lat.index(col);
    for (const auto& [k, c] : a.coefficients()) {
      for (std::size_t j = 0; j < m.size(); ++j) m[j] = n[j] + k[j];
      if (const auto row = lat.position(m)) trips.emplace_back(*row, col, c * phase(k, n, a.theta()));
    }
  }
  return trips;
}

}  // namespace

SparseXcd rho_matrix(const FourierElement& a, const TruncationLattice& lat) {
  check_dims(a, lat, "rho_matrix");
  const auto trips = rho_triplets(a, lat);
  SparseXcd m(lat.size(), lat.size());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

MatrixXcd rho_matrix_dense(const FourierElement& a, const TruncationLattice& lat) {
  return MatrixXcd(rho_matrix(a, lat));
}

GammaFamily gamma_family(int d) {
  if (d < 2) throw std::invalid_argument("gamma_family: d must be at least 2");
  const int k = d / 2;
  MatrixXcd id = MatrixXcd::Identity(2, 2);
  MatrixXcd s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, cplx(0, -1), cplx(0, 1), 0;
  s3 << 1, 0, 0, -1;
  auto kron = [](const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  // Jordan-Wigner: gamma_{2l-1} = s3^{(l-1)} s1 I^{(k-l)}, gamma_{2l} = s3^{(l-1)} s2 I^{(k-l)},
  // and for odd d the last one is s3^{(k)}.
  auto chain = [&](int l, const MatrixXcd& middle) {
    MatrixXcd out = MatrixXcd::Identity(1, 1);
    for (int i = 0; i < k; ++i) out = kron(out, i < l ? s3 : (i == l ? middle : id));
    return out;
  };
  GammaFamily g;
  g.d = d;
  g.spinor_dim = 1 << k;
  for (int l = 0; l < k; ++l) {
    g.matrices.push_back(chain(l, s1));
    g.matrices.push_back(chain(l, s2));
  }
  if (d % 2 == 1) g.matrices.push_back(chain(k, id));
  return g;
}

HermitianOperator dirac_matrix(const TruncationLattice& lat, const GammaFamily& gammas) {
  if (gammas.d != lat.dim()) throw std::invalid_argument("dirac_matrix: gamma family and lattice dimensions differ");
  const Index s = gammas.spinor_dim;
  std::vector<Eigen::Triplet<cplx>> trips;
  for (Index pos = 0; pos < lat.size(); ++pos) {
    MatrixXcd block = MatrixXcd::Zero(s, s);
    for (int j = 0; j < lat.dim(); ++j)
      block += static_cast<double>(lat.coordinate(pos, j)) * gammas.matrices[static_cast<std::size_t>(j)];
    for (Index b = 0; b < s; ++b)
      for (Index a = 0; a < s; ++a)
        if (block(a, b) != cplx{}) trips.emplace_back(pos * s + a, pos * s + b, block(a, b));
  }
  SparseXcd m(lat.size() * s, lat.size() * s);
  m.setFromTriplets(trips.begin(), trips.end());
  return HermitianOperator::from_sparse(std::move(m));
}

HermitianOperator symmetrized_compact(const FourierElement& a, const TruncationLattice& lat, double p) {
  check_dims(a, lat, "symmetrized_compact");
  if (!a.is_self_adjoint(1e-13)) throw std::invalid_argument("symmetrized_compact: element is not self-adjoint");
  std::vector<double> w(static_cast<std::size_t>(lat.size()));
  for (Index i = 0; i < lat.size(); ++i)
    w[static_cast<std::size_t>(i)] = std::pow(1.0 + static_cast<double>(lat.norm_sq(i)), -0.25 * p);

  const bool constant = a.coefficients().size() <= 1 && a.support_radius() == 0;
  if (constant) {
    const double c = tau(a).real();
    VectorXcd d(lat.size());
    for (Index i = 0; i < lat.size(); ++i) d(i) = c * w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
    return HermitianOperator::from_diagonal(std::move(d));
  }
  SparseXcd m = rho_matrix(a, lat);
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SparseXcd::InnerIterator it(m, k); it; ++it)
      it.valueRef() *= w[static_cast<std::size_t>(it.row())] * w[static_cast<std::size_t>(it.col())];
  return HermitianOperator::from_sparse(std::move(m));
}

HermitianOperator schrodinger_matrix(const TruncationLattice& lat, double h, const FourierElement& v, double lambda,
                                     bool spinor) {
  check_dims(v, lat, "schrodinger_matrix");
  if (!(h > 0.0)) throw std::invalid_argument("schrodinger_matrix: h must be positive");
  if (!v.is_self_adjoint(1e-13)) throw std::invalid_argument("schrodinger_matrix: potential is not self-adjoint");
  const Index s = spinor ? gamma_family(lat.dim()).spinor_dim : 1;
  const double h2 = h * h;

  const bool constant = v.coefficients().size() <= 1 && v.support_radius() == 0;
  if (constant) {
    const double c = tau(v).real();
    VectorXcd d(lat.size() * s);
    for (Index i = 0; i < lat.size(); ++i)
      for (Index a = 0; a < s; ++a) d(i * s + a) = h2 * static_cast<double>(lat.norm_sq(i)) + c - lambda;
    return HermitianOperator::from_diagonal(std::move(d));
  }

  auto trips = rho_triplets(v, lat);
  std::vector<Eigen::Triplet<cplx>> full;
  full.reserve((trips.size() + static_cast<std::size_t>(lat.size())) * static_cast<std::size_t>(s));
  for (const auto& t : trips)
    for (Index a = 0; a < s; ++a) full.emplace_back(t.row() * s + a, t.col() * s + a, t.value());
  for (Index i = 0; i < lat.size(); ++i)
    for (Index a = 0; a < s; ++a)
      full.emplace_back(i * s + a, i * s + a, h2 * static_cast<double>(lat.norm_sq(i)) - lambda);
  SparseXcd m(lat.size() * s, lat.size() * s);
  m.setFromTriplets(full.begin(), full.end());
  return HermitianOperator::from_sparse(std::move(m));
}

namespace {

// Eigendecomposition of the block of rho_N(V) that contains the origin, and
// the origin's position inside that block.
std::pair<SpectralData, Index> origin_block(const FourierElement& v, const TruncationLattice& lat) {
  check_dims(v, lat, "tau_of_function");
  if (!v.is_self_adjoint(1e-13)) throw std::invalid_argument("tau_of_function: element is not self-adjoint");
  const SparseXcd m = rho_matrix(v, lat);
  const Index origin = lat.origin();
  for (const auto& block : connected_blocks(m)) {
    const auto it = std::find(block.begin(), block.end(), origin);
    if (it == block.end()) continue;
    if (block.size() > 6000)
      throw std::length_error("tau_of_function: block containing the origin is too large for a dense solve");
    MatrixXcd dense = extract_block(m, block);
    return {eig_hermitian(dense), static_cast<Index>(it - block.begin())};
  }
  throw std::logic_error("tau_of_function: origin not found");
}

}  // namespace

double tau_of_function(const FourierElement& v, const std::function<double(double)>& f,
                       const TruncationLattice& lat) {
  const auto [sd, row] = origin_block(v, lat);
  double acc = 0.0;
  for (Index k = 0; k < sd.eigenvalues.size(); ++k) acc += f(sd.eigenvalues(k)) * std::norm(sd.eigenvectors(row, k));
  return acc;
}

cplx tau_of_function_complex(const FourierElement& v, const std::function<cplx(double)>& f,
                             const TruncationLattice& lat) {
  const auto [sd, row] = origin_block(v, lat);
  cplx acc = 0.0;
  for (Index k = 0; k < sd.eigenvalues.size(); ++k) acc += f(sd.eigenvalues(k)) * std::norm(sd.eigenvectors(row, k));
  return acc;
}

namespace {

template <class T>
void write_le(std::ofstream& out, T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto* p = reinterpret_cast<unsigned char*>(&value);
    std::reverse(p, p + sizeof(T));
  }
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_le(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("import_operator: truncated binary file");
  if constexpr (std::endian::native == std::endian::big) {
    auto* p = reinterpret_cast<unsigned char*>(&value);
    std::reverse(p, p + sizeof(T));
  }
  return value;
}

const char* storage_name(HermitianOperator::Storage s) {
  switch (s) {
    case HermitianOperator::Storage::dense:
      return "dense";
    case HermitianOperator::Storage::diagonal:
      return "diagonal";
    case HermitianOperator::Storage::sparse:
      return "sparse-coo";
  }
  return "";
}

}  // namespace

void export_operator(const HermitianOperator& op, const TruncationLattice* lat, const std::filesystem::path& stem) {
  std::filesystem::path bin = stem, side = stem;
  bin += ".bin";
  side += ".json";
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw std::runtime_error("export_operator: cannot open " + bin.string());

  nlohmann::json meta = {{"dim", op.dim()},
                         {"hermitian", op.hermitian()},
                         {"diagonal", op.diagonal()},
                         {"storage", storage_name(op.storage())},
                         {"dtype", "complex128"},
                         {"byte_order", "little"}};
  switch (op.storage()) {
    case HermitianOperator::Storage::dense: {
      meta["layout"] = "column-major";
      const MatrixXcd& m = op.dense();
      for (Index k = 0; k < m.size(); ++k) {
        write_le(out, m.data()[k].real());
        write_le(out, m.data()[k].imag());
      }
      break;
    }
    case HermitianOperator::Storage::diagonal:
      meta["layout"] = "diagonal";
      for (Index k = 0; k < op.dim(); ++k) {
        write_le(out, op.diagonal_entries()(k).real());
        write_le(out, op.diagonal_entries()(k).imag());
      }
      break;
    case HermitianOperator::Storage::sparse: {
      meta["layout"] = "coo(int64 row, int64 col, float64 re, float64 im)";
      std::int64_t nnz = 0;
      const SparseXcd& m = op.sparse();
      for (Index k = 0; k < m.outerSize(); ++k)
        for (SparseXcd::InnerIterator it(m, k); it; ++it) {
          write_le<std::int64_t>(out, it.row());
          write_le<std::int64_t>(out, it.col());
          write_le(out, it.value().real());
          write_le(out, it.value().imag());
          ++nnz;
        }
      meta["nnz"] = nnz;
      break;
    }
  }
  if (lat != nullptr)
    meta["lattice"] = {{"d", lat->dim()}, {"N", lat->radius()}, {"size", lat->size()}, {"ordering", "lexicographic"}};
  std::ofstream js(side);
  if (!js) throw std::runtime_error("export_operator: cannot open " + side.string());
  js << meta.dump(2) << '\n';
}

HermitianOperator import_operator(const std::filesystem::path& stem) {
  std::filesystem::path bin = stem, side = stem;
  bin += ".bin";
  side += ".json";
  std::ifstream js(side);
  if (!js) throw std::runtime_error("import_operator: cannot open " + side.string());
  const nlohmann::json meta = nlohmann::json::parse(js);
  const Index dim = meta.at("dim").get<Index>();
  const std::string storage = meta.at("storage").get<std::string>();
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw std::runtime_error("import_operator: cannot open " + bin.string());
  auto read_c = [&] {
    const double re = read_le<double>(in);
    const double im = read_le<double>(in);
    return cplx(re, im);
  };
  if (storage == "dense") {
    MatrixXcd m(dim, dim);
    for (Index k = 0; k < m.size(); ++k) m.data()[k] = read_c();
    return HermitianOperator::from_dense(std::move(m));
  }
  if (storage == "diagonal") {
    VectorXcd d(dim);
    for (Index k = 0; k < dim; ++k) d(k) = read_c();
    return HermitianOperator::from_diagonal(std::move(d));
  }
  if (storage == "sparse-coo") {
    const auto nnz = meta.at("nnz").get<std::int64_t>();
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(static_cast<std::size_t>(nnz));
    for (std::int64_t k = 0; k < nnz; ++k) {
      const auto r = read_le<std::int64_t>(in);
      const auto c = read_le<std::int64_t>(in);
      trips.emplace_back(static_cast<Index>(r), static_cast<Index>(c), read_c());
    }
    SparseXcd m(dim, dim);
    m.setFromTriplets(trips.begin(), trips.end());
    return HermitianOperator::from_sparse(std::move(m));
  }
  throw std::runtime_error("import_operator: unknown storage '" + storage + "'");
}

}  // namespace nct
