#include "dmtlab/prime_field.hpp"

#include <algorithm>

#include "dmtlab/error.hpp"

namespace dmtlab {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t result = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) result = mul_mod(result, a, p);
    a = mul_mod(a, a, p);
    e >>= 1;
  }
  return result;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
  if (a % p == 0) throw InputError("inv_mod: zero has no inverse");
  return pow_mod(a, p - 2, p);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t next_prime(std::uint64_t n) {
  while (!is_prime(n)) ++n;
  return n;
}

PrimeFieldMatrix::PrimeFieldMatrix(std::uint64_t p, Eigen::Index rows, Eigen::Index cols)
    : p_(p), a_(FieldMatrixStorage::Zero(rows, cols)) {
  if (!is_prime(p)) throw InputError("PrimeFieldMatrix: modulus " + std::to_string(p) + " is not prime");
}

PrimeFieldMatrix::PrimeFieldMatrix(std::uint64_t p, FieldMatrixStorage entries) : p_(p), a_(std::move(entries)) {
  if (!is_prime(p)) throw InputError("PrimeFieldMatrix: modulus " + std::to_string(p) + " is not prime");
  a_ = a_.unaryExpr([p](std::uint64_t v) { return v % p; });
}

namespace {

struct Elimination {
  FieldMatrixStorage reduced;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pivots;
};

// Column-by-column elimination; the pivot row for each column is the
// lowest-index unused row with a nonzero entry.
Elimination eliminate(const PrimeFieldMatrix& m) {
  const std::uint64_t p = m.modulus();
  Elimination out{m.entries(), {}};
  FieldMatrixStorage& a = out.reduced;
  std::vector<bool> used(static_cast<std::size_t>(a.rows()), false);
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    Eigen::Index pivot = -1;
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      if (!used[static_cast<std::size_t>(r)] && a(r, c) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    used[static_cast<std::size_t>(pivot)] = true;
    out.pivots.push_back({pivot, c});
    const std::uint64_t inv = inv_mod(a(pivot, c), p);
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      if (used[static_cast<std::size_t>(r)] || a(r, c) == 0) continue;
      const std::uint64_t f = mul_mod(a(r, c), inv, p);
      for (Eigen::Index k = c; k < a.cols(); ++k)
        a(r, k) = (a(r, k) + p - mul_mod(f, a(pivot, k), p)) % p;
    }
  }
  return out;
}

}  // namespace

RankWitness rank_with_witness(const PrimeFieldMatrix& m) {
  auto e = eliminate(m);
  RankWitness w;
  w.rank = static_cast<int>(e.pivots.size());
  for (auto [r, c] : e.pivots) {
    w.rows.push_back(r);
    w.cols.push_back(c);
  }
  std::sort(w.rows.begin(), w.rows.end());
  std::sort(w.cols.begin(), w.cols.end());
  return w;
}

int rank(const PrimeFieldMatrix& m) { return rank_with_witness(m).rank; }

std::uint64_t determinant(const PrimeFieldMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("determinant: matrix is not square");
  const std::uint64_t p = m.modulus();
  auto e = eliminate(m);
  if (static_cast<Eigen::Index>(e.pivots.size()) < m.rows()) return 0;
  // Pivot c sits in row pivots[c].first; the permutation sign comes from
  // sorting those rows.
  std::uint64_t det = 1;
  std::vector<Eigen::Index> perm;
  for (auto [r, c] : e.pivots) {
    det = mul_mod(det, e.reduced(r, c), p);
    perm.push_back(r);
  }
  bool odd = false;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) odd = !odd;
  return odd && det != 0 ? p - det : det;
}

}  // namespace dmtlab
