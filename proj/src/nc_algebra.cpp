#include "nct/nc_algebra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace nct {

ThetaMatrix::ThetaMatrix(int d, std::vector<double> row_major) : d_(d), entries_(std::move(row_major)) {
  if (d < 2) throw std::invalid_argument("ThetaMatrix: dimension must be at least 2");
  if (entries_.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d))
    throw std::invalid_argument("ThetaMatrix: expected d*d entries");
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      if ((*this)(j, k) != -(*this)(k, j))
        throw std::invalid_argument("ThetaMatrix: matrix is not antisymmetric");
}

ThetaMatrix ThetaMatrix::zero(int d) {
  return ThetaMatrix(d, std::vector<double>(static_cast<std::size_t>(d * d), 0.0));
}

ThetaMatrix ThetaMatrix::single_block(int d, double value) {
  std::vector<double> e(static_cast<std::size_t>(d * d), 0.0);
  e[1] = value;
  e[static_cast<std::size_t>(d)] = -value;
  return ThetaMatrix(d, std::move(e));
}

bool ThetaMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](double v) { return v == 0.0; });
}

cplx phase(const MultiIndex& m, const MultiIndex& n, const ThetaMatrix& theta) {
  const int d = theta.dim();
  if (static_cast<int>(m.size()) != d || static_cast<int>(n.size()) != d)
    throw std::invalid_argument("phase: multi-index dimension does not match theta");
  double turns = 0.0;
  for (int j = 1; j < d; ++j)
    for (int k = 0; k < j; ++k) turns += theta(j, k) * static_cast<double>(m[j]) * static_cast<double>(n[k]);
  if (turns == 0.0) return {1.0, 0.0};
  turns -= std::nearbyint(turns);
  return std::polar(1.0, 2.0 * std::numbers::pi * turns);
}

FourierElement FourierElement::constant(const ThetaMatrix& theta, cplx c) {
  return monomial(theta, MultiIndex(static_cast<std::size_t>(theta.dim()), 0), c);
}

FourierElement FourierElement::monomial(const ThetaMatrix& theta, const MultiIndex& n, cplx c) {
  FourierElement a(theta);
  a.add_term(n, c);
  return a;
}

FourierElement FourierElement::generator(const ThetaMatrix& theta, int j) {
  if (j < 1 || j > theta.dim()) throw std::invalid_argument("generator: index out of range");
  MultiIndex n(static_cast<std::size_t>(theta.dim()), 0);
  n[static_cast<std::size_t>(j - 1)] = 1;
  return monomial(theta, n);
}

void FourierElement::check_index(const MultiIndex& n) const {
  if (static_cast<int>(n.size()) != theta_.dim())
    throw std::invalid_argument("FourierElement: multi-index dimension mismatch");
}

cplx FourierElement::coefficient(const MultiIndex& n) const {
  check_index(n);
  auto it = coeffs_.find(n);
  return it == coeffs_.end() ? cplx{} : it->second;
}

void FourierElement::add_term(const MultiIndex& n, cplx c) {
  check_index(n);
  if (c == cplx{}) return;
  auto [it, inserted] = coeffs_.try_emplace(n, c);
  if (!inserted) {
    it->second += c;
    if (it->second == cplx{}) coeffs_.erase(it);
  }
}

int FourierElement::support_radius() const {
  int r = 0;
  for (const auto& [n, c] : coeffs_)
    for (int v : n) r = std::max(r, std::abs(v));
  return r;
}

double FourierElement::l1_norm() const {
  double s = 0.0;
  for (const auto& [n, c] : coeffs_) s += std::abs(c);
  return s;
}

bool FourierElement::is_self_adjoint(double tol) const {
  const FourierElement adj = adjoint(*this);
  for (const auto& [n, c] : coeffs_)
    if (std::abs(adj.coefficient(n) - c) > tol * std::max(1.0, std::abs(c))) return false;
  for (const auto& [n, c] : adj.coeffs_)
    if (std::abs(coefficient(n) - c) > tol * std::max(1.0, std::abs(c))) return false;
  return true;
}

FourierElement& FourierElement::operator+=(const FourierElement& other) {
  if (!(theta_ == other.theta_)) throw std::invalid_argument("FourierElement: theta mismatch");
  for (const auto& [n, c] : other.coeffs_) add_term(n, c);
  return *this;
}

FourierElement& FourierElement::operator*=(cplx c) {
  if (c == cplx{}) {
    coeffs_.clear();
    return *this;
  }
  for (auto& [n, v] : coeffs_) v *= c;
  return *this;
}

FourierElement operator-(FourierElement a, const FourierElement& b) {
  FourierElement nb = b;
  nb *= -1.0;
  return a += nb;
}

FourierElement multiply(const FourierElement& a, const FourierElement& b) {
  if (!(a.theta() == b.theta())) throw std::invalid_argument("multiply: theta mismatch");
  FourierElement out(a.theta());
  MultiIndex k(static_cast<std::size_t>(a.dim()));
  for (const auto& [m, am] : a.coefficients())
    for (const auto& [n, bn] : b.coefficients()) {
      for (std::size_t i = 0; i < k.size(); ++i) k[i] = m[i] + n[i];
      out.add_term(k, am * bn * phase(m, n, a.theta()));
    }
  return out;
}

FourierElement adjoint(const FourierElement& a) {
  FourierElement out(a.theta());
  MultiIndex neg(static_cast<std::size_t>(a.dim()));
  for (const auto& [n, c] : a.coefficients()) {
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -n[i];
    out.add_term(neg, std::conj(c) * std::conj(phase(n, neg, a.theta())));
  }
  return out;
}

cplx tau(const FourierElement& a) {
  return a.coefficient(MultiIndex(static_cast<std::size_t>(a.dim()), 0));
}

FourierElement make_positive(const FourierElement& b) { return multiply(adjoint(b), b); }

nlohmann::json to_json(const ThetaMatrix& theta) {
  return {{"d", theta.dim()}, {"theta", theta.row_major()}};
}

ThetaMatrix theta_from_json(const nlohmann::json& j) {
  return ThetaMatrix(j.at("d").get<int>(), j.at("theta").get<std::vector<double>>());
}

nlohmann::json to_json(const FourierElement& a) {
  nlohmann::json j = to_json(a.theta());
  auto& list = j["coeffs"] = nlohmann::json::array();
  for (const auto& [n, c] : a.coefficients())
    list.push_back({{"index", n}, {"re", c.real()}, {"im", c.imag()}});
  return j;
}

FourierElement element_from_json(const nlohmann::json& j) {
  FourierElement a(theta_from_json(j));
  for (const auto& rec : j.at("coeffs"))
    a.add_term(rec.at("index").get<MultiIndex>(), {rec.at("re").get<double>(), rec.at("im").get<double>()});
  return a;
}

namespace {

double parse_real(const std::string& s, const std::string& whole) {
  if (s.empty() || s == "+") return 1.0;
  if (s == "-") return -1.0;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse complex number '" + whole + "'");
  }
  if (pos != s.size()) throw std::invalid_argument("cannot parse complex number '" + whole + "'");
  return v;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw std::invalid_argument("empty complex literal");
  if (s.back() != 'i') return {parse_real(s, text), 0.0};
  s.pop_back();
  // split at the last sign that is not the leading one and not an exponent sign
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, parse_real(s, text)};
  return {parse_real(s.substr(0, split), text), parse_real(s.substr(split), text)};
}

std::string format_complex(cplx c) {
  if (c.imag() == 0.0) return format_real(c.real());
  std::string im = format_real(c.imag());
  if (c.real() == 0.0) return im + "i";
  if (im.front() != '-') im.insert(im.begin(), '+');
  return format_real(c.real()) + im + "i";
}

FourierElement parse_element(const std::string& text, const ThetaMatrix& theta) {
  FourierElement a(theta);
  std::istringstream in(text);
  std::string term;
  while (in >> term) {
    const auto at = term.find('@');
    if (at == std::string::npos) {  // bare coefficient: constant term
      a.add_term(MultiIndex(static_cast<std::size_t>(theta.dim()), 0), parse_complex(term));
      continue;
    }
    const cplx c = parse_complex(term.substr(0, at));
    MultiIndex n;
    std::stringstream idx(term.substr(at + 1));
    std::string part;
    while (std::getline(idx, part, ',')) {
      std::size_t pos = 0;
      int v = 0;
      try {
        v = std::stoi(part, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad multi-index in element term '" + term + "'");
      }
      if (pos != part.size()) throw std::invalid_argument("bad multi-index in element term '" + term + "'");
      n.push_back(v);
    }
    if (static_cast<int>(n.size()) != theta.dim())
      throw std::invalid_argument("element term '" + term + "' has wrong index dimension");
    a.add_term(n, c);
  }
  return a;
}

std::string format_element(const FourierElement& a) {
  std::string out;
  for (const auto& [n, c] : a.coefficients()) {
    if (!out.empty()) out += ' ';
    out += format_complex(c) + '@';
    for (std::size_t i = 0; i < n.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(n[i]);
    }
  }
  return out;
}

}  // namespace nct
