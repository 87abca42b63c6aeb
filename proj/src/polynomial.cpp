#include "dmtlab/polynomial.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>
#include <unordered_map>

#include "dmtlab/error.hpp"
#include "dmtlab/prime_field.hpp"

namespace dmtlab {

Monomial Monomial::var(VarId v, std::uint32_t exponent) {
  Monomial m;
  if (exponent > 0) m.powers_.push_back({v, exponent});
  return m;
}

std::uint32_t Monomial::degree() const {
  std::uint32_t d = 0;
  for (const auto& [v, e] : powers_) d += e;
  return d;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  auto a = powers_.begin();
  auto b = other.powers_.begin();
  while (a != powers_.end() || b != other.powers_.end()) {
    if (b == other.powers_.end() || (a != powers_.end() && a->first < b->first)) {
      out.powers_.push_back(*a++);
    } else if (a == powers_.end() || b->first < a->first) {
      out.powers_.push_back(*b++);
    } else {
      out.powers_.push_back({a->first, a->second + b->second});
      ++a;
      ++b;
    }
  }
  return out;
}

Polynomial Polynomial::constant(std::int64_t c) {
  Polynomial p;
  p.add_term(Monomial(), c);
  return p;
}

Polynomial Polynomial::var(VarId v) {
  Polynomial p;
  p.add_term(Monomial::var(v), 1);
  return p;
}

void Polynomial::add_term(const Monomial& m, std::int64_t c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (inserted) return;
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

std::uint32_t Polynomial::total_degree() const {
  std::uint32_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

std::int64_t Polynomial::constant_term() const {
  auto it = terms_.find(Monomial());
  return it == terms_.end() ? 0 : it->second;
}

std::vector<VarId> Polynomial::variables() const {
  std::set<VarId> vs;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m.powers()) vs.insert(v);
  return {vs.begin(), vs.end()};
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

std::uint64_t Polynomial::evaluate_mod(std::span<const std::uint64_t> values, std::uint64_t p) const {
  std::uint64_t sum = 0;
  for (const auto& [mono, coef] : terms_) {
    std::int64_t c = coef % static_cast<std::int64_t>(p);
    std::uint64_t term = static_cast<std::uint64_t>(c < 0 ? c + static_cast<std::int64_t>(p) : c);
    for (const auto& [v, e] : mono.powers()) term = mul_mod(term, pow_mod(values[v] % p, e, p), p);
    sum = (sum + term) % p;
  }
  return sum;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mono, coef] : terms_) {
    std::int64_t c = coef;
    if (!first) {
      os << (c < 0 ? " - " : " + ");
      c = c < 0 ? -c : c;
    }
    first = false;
    bool need_star = false;
    if (mono.is_one() || (c != 1 && c != -1)) {
      os << c;
      need_star = true;
    } else if (c == -1) {
      os << "-";
    }
    for (const auto& [v, e] : mono.powers()) {
      if (need_star) os << "*";
      if (v < names.size()) os << names[v];
      else os << "x" << v;
      if (e > 1) os << "^" << e;
      need_star = true;
    }
  }
  return os.str();
}

const Polynomial& PolyMatrix::at(Index r, Index c) const {
  static const Polynomial zero;
  auto it = entries_.find({r, c});
  return it == entries_.end() ? zero : it->second;
}

void PolyMatrix::set(Index r, Index c, Polynomial p) {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw InputError("PolyMatrix: index out of range");
  if (p.is_zero()) entries_.erase({r, c});
  else entries_[{r, c}] = std::move(p);
}

void PolyMatrix::add(Index r, Index c, const Polynomial& p) {
  Polynomial sum = at(r, c);
  sum += p;
  set(r, c, std::move(sum));
}

PolyMatrix PolyMatrix::submatrix(std::span<const Index> rows, std::span<const Index> cols) const {
  PolyMatrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const Polynomial& p = at(rows[i], cols[j]);
      if (!p.is_zero()) out.set(static_cast<Index>(i), static_cast<Index>(j), p);
    }
  return out;
}

PolyMatrix PolyMatrix::transpose() const {
  PolyMatrix out(cols_, rows_);
  for (const auto& [rc, p] : entries_) out.set(rc.second, rc.first, p);
  return out;
}

std::vector<VarId> PolyMatrix::variables() const {
  std::set<VarId> vs;
  for (const auto& [rc, p] : entries_)
    for (VarId v : p.variables()) vs.insert(v);
  return {vs.begin(), vs.end()};
}

std::uint32_t PolyMatrix::max_degree() const {
  std::uint32_t d = 0;
  for (const auto& [rc, p] : entries_) d = std::max(d, p.total_degree());
  return d;
}

Eigen::MatrixXcd PolyMatrix::evaluate(std::span<const std::complex<double>> values) const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows_, cols_);
  for (const auto& [rc, p] : entries_) m(rc.first, rc.second) = p.evaluate<std::complex<double>>(values);
  return m;
}

Polynomial determinant(const PolyMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("determinant: matrix is not square");
  const auto n = static_cast<int>(m.rows());
  if (n == 0) return Polynomial::constant(1);
  if (n > 16) throw InputError("determinant: symbolic expansion limited to 16 x 16");
  // minors[mask] = determinant of rows (n - popcount(mask) .. n-1) by the
  // columns in mask, built from the last row upward.
  std::unordered_map<std::uint32_t, Polynomial> minors{{0u, Polynomial::constant(1)}};
  for (int row = n - 1; row >= 0; --row) {
    std::unordered_map<std::uint32_t, Polynomial> next;
    for (const auto& [mask, minor] : minors) {
      if (minor.is_zero()) continue;
      for (int col = 0; col < n; ++col) {
        const std::uint32_t bit = 1u << col;
        if (mask & bit) continue;
        const Polynomial& a = m.at(row, col);
        if (a.is_zero()) continue;
        // Sign from the position of `col` among the columns of the new mask.
        const int before = std::popcount(mask & (bit - 1));
        Polynomial term = a * minor;
        if (before % 2) next[mask | bit] -= term;
        else next[mask | bit] += term;
      }
    }
    minors = std::move(next);
  }
  auto it = minors.find((n == 32 ? 0u : (1u << n)) - 1);
  return it == minors.end() ? Polynomial() : it->second;
}

CompiledPolyMatrix::CompiledPolyMatrix(const PolyMatrix& m) : rows_(m.rows()), cols_(m.cols()) {
  for (const auto& [rc, p] : m.entries())
    for (const auto& [mono, coef] : p.terms()) {
      Term t{rc.first, rc.second, static_cast<double>(coef), static_cast<std::uint32_t>(factors_.size()), 0};
      for (const auto& [v, e] : mono.powers())
        for (std::uint32_t k = 0; k < e; ++k) factors_.push_back(v);
      t.count = static_cast<std::uint32_t>(factors_.size()) - t.first;
      terms_.push_back(t);
    }
}

void CompiledPolyMatrix::evaluate(std::span<const std::complex<double>> values, Eigen::MatrixXcd& out) const {
  out.setZero(rows_, cols_);
  for (const Term& t : terms_) {
    std::complex<double> v(t.coef, 0.0);
    for (std::uint32_t k = 0; k < t.count; ++k) v *= values[factors_[t.first + k]];
    out(t.row, t.col) += v;
  }
}

}  // namespace dmtlab
