#pragma once

// Sparse multivariate polynomials with integer coefficients over fading
// variables, and matrices of them. Unit-gain amplify-and-forward never needs
// anything but integer coefficients, so the same objects can be evaluated
// over the complex numbers and over prime fields.

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dmtlab {

using VarId = std::uint32_t;

class Monomial {
 public:
  Monomial() = default;
  static Monomial var(VarId v, std::uint32_t exponent = 1);

  /// (variable, exponent) pairs, sorted by variable, exponents > 0.
  const std::vector<std::pair<VarId, std::uint32_t>>& powers() const { return powers_; }
  std::uint32_t degree() const;
  bool is_one() const { return powers_.empty(); }

  Monomial operator*(const Monomial& other) const;
  auto operator<=>(const Monomial&) const = default;

 private:
  std::vector<std::pair<VarId, std::uint32_t>> powers_;
};

class Polynomial {
 public:
  Polynomial() = default;
  static Polynomial constant(std::int64_t c);
  static Polynomial var(VarId v);

  const std::map<Monomial, std::int64_t>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::uint32_t total_degree() const;
  std::int64_t constant_term() const;
  std::vector<VarId> variables() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  bool operator==(const Polynomial&) const = default;

  /// Evaluates with `values[v]` substituted for variable v.
  template <typename Scalar>
  Scalar evaluate(std::span<const Scalar> values) const {
    Scalar sum(0);
    for (const auto& [mono, coef] : terms_) {
      Scalar term(static_cast<double>(coef));
      for (const auto& [v, e] : mono.powers())
        for (std::uint32_t k = 0; k < e; ++k) term *= values[v];
      sum += term;
    }
    return sum;
  }

  /// Evaluation in F_p, p < 2^63.
  std::uint64_t evaluate_mod(std::span<const std::uint64_t> values, std::uint64_t p) const;

  std::string to_string(const std::vector<std::string>& names = {}) const;

 private:
  void add_term(const Monomial& m, std::int64_t c);
  std::map<Monomial, std::int64_t> terms_;
};

/// Matrix of polynomials; structural zeros are not stored.
class PolyMatrix {
 public:
  using Index = Eigen::Index;

  PolyMatrix() = default;
  PolyMatrix(Index rows, Index cols) : rows_(rows), cols_(cols) {}

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  /// Structural zeros come back as the zero polynomial.
  const Polynomial& at(Index r, Index c) const;
  void set(Index r, Index c, Polynomial p);
  void add(Index r, Index c, const Polynomial& p);
  const std::map<std::pair<Index, Index>, Polynomial>& entries() const { return entries_; }

  PolyMatrix submatrix(std::span<const Index> rows, std::span<const Index> cols) const;
  PolyMatrix transpose() const;
  std::vector<VarId> variables() const;
  std::uint32_t max_degree() const;
  bool operator==(const PolyMatrix&) const = default;

  Eigen::MatrixXcd evaluate(std::span<const std::complex<double>> values) const;
  Eigen::MatrixXcd evaluate(const Eigen::VectorXcd& values) const {
    return evaluate(std::span<const std::complex<double>>(values.data(), static_cast<std::size_t>(values.size())));
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::map<std::pair<Index, Index>, Polynomial> entries_;
};

/// Determinant of a square polynomial matrix by cofactor expansion over
/// column subsets. Intended for the small witness submatrices (n <= 16).
Polynomial determinant(const PolyMatrix& m);

/// Flattened evaluator for repeated numeric evaluation in Monte Carlo loops.
class CompiledPolyMatrix {
 public:
  CompiledPolyMatrix() = default;
  explicit CompiledPolyMatrix(const PolyMatrix& m);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  void evaluate(std::span<const std::complex<double>> values, Eigen::MatrixXcd& out) const;

 private:
  struct Term {
    Eigen::Index row;
    Eigen::Index col;
    double coef;
    std::uint32_t first;
    std::uint32_t count;
  };
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<Term> terms_;
  std::vector<VarId> factors_;
};

}  // namespace dmtlab
