#pragma once

// Dense matrices over a prime field F_p with p < 2^63.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace dmtlab {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t p);
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p);

/// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime(std::uint64_t n);
/// Smallest prime >= n.
std::uint64_t next_prime(std::uint64_t n);

/// Mersenne prime 2^61 - 1, the default field for randomized rank tests.
inline constexpr std::uint64_t kLargePrime = (std::uint64_t{1} << 61) - 1;

using FieldMatrixStorage = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>;

class PrimeFieldMatrix {
 public:
  PrimeFieldMatrix(std::uint64_t p, Eigen::Index rows, Eigen::Index cols);
  /// Reduces every entry mod p; throws InputError if p is not prime.
  PrimeFieldMatrix(std::uint64_t p, FieldMatrixStorage entries);

  std::uint64_t modulus() const { return p_; }
  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index cols() const { return a_.cols(); }
  std::uint64_t operator()(Eigen::Index r, Eigen::Index c) const { return a_(r, c); }
  void set(Eigen::Index r, Eigen::Index c, std::uint64_t v) { a_(r, c) = v % p_; }
  const FieldMatrixStorage& entries() const { return a_; }

 private:
  std::uint64_t p_;
  FieldMatrixStorage a_;
};

/// Rank with an r x r nonsingular submatrix as witness (original row and
/// column indices, increasing).
struct RankWitness {
  int rank = 0;
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> cols;
};

RankWitness rank_with_witness(const PrimeFieldMatrix& m);
int rank(const PrimeFieldMatrix& m);
std::uint64_t determinant(const PrimeFieldMatrix& m);

}  // namespace dmtlab
