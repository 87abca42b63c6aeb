#include <doctest.h>

#include <algorithm>
#include <random>

#include "dmtlab/det_lift.hpp"
#include "dmtlab/error.hpp"
#include "dmtlab/polynomial.hpp"
#include "dmtlab/prime_field.hpp"
#include "oracles.hpp"

using namespace dmtlab;

namespace {

Polynomial v(VarId id) { return Polynomial::var(id); }

SuperNode node(const std::string& id, Role role = Role::Relay, int antennas = 1) {
  return SuperNode{id, antennas, role, Duplex::Full};
}

NetworkGraph diamond() {
  return NetworkGraph({node("s", Role::Source), node("a"), node("b"), node("t", Role::Sink)},
                      {{{0, 0}, {1, 0}, ""}, {{0, 0}, {2, 0}, ""}, {{1, 0}, {3, 0}, ""}, {{2, 0}, {3, 0}, ""}});
}

NetworkGraph single_edge() {
  return NetworkGraph({node("s", Role::Source), node("t", Role::Sink)}, {{{0, 0}, {1, 0}, ""}});
}

// Source (2) -> relay layer (2) -> sink (2), full bipartite links.
NetworkGraph two_layer() {
  std::vector<EdgeSpec> edges;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) edges.push_back({{0, a}, {1, b}, ""});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) edges.push_back({{1, a}, {2, b}, ""});
  return NetworkGraph({node("s", Role::Source, 2), node("r", Role::Relay, 2), node("t", Role::Sink, 2)}, edges);
}

// Reference rank over F_p by plain Gaussian elimination on a copy.
int reference_rank(FieldMatrixStorage a, std::uint64_t p) {
  int r = 0;
  for (Eigen::Index c = 0; c < a.cols() && r < a.rows(); ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = r; i < a.rows(); ++i)
      if (a(i, c) % p) piv = i;
    if (piv < 0) continue;
    a.row(piv).swap(a.row(r));
    const std::uint64_t inv = inv_mod(a(r, c), p);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i == r || a(i, c) == 0) continue;
      const std::uint64_t f = mul_mod(a(i, c), inv, p);
      for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = (a(i, j) + p - mul_mod(f, a(r, j), p)) % p;
    }
    ++r;
  }
  return r;
}

}  // namespace

TEST_CASE("polynomial arithmetic") {
  auto p = (v(0) + v(1)) * (v(0) - v(1));
  CHECK(p == v(0) * v(0) - v(1) * v(1));
  CHECK(p.total_degree() == 2);
  CHECK((p - p).is_zero());
  std::vector<double> x{3.0, 2.0};
  CHECK(p.evaluate<double>(x) == 5.0);
  std::vector<std::uint64_t> xm{3, 5};
  CHECK(p.evaluate_mod(xm, 7) == (9 + 7 * 3 - 25 % 7) % 7);
  CHECK(Polynomial::constant(-2).evaluate_mod(xm, 7) == 5);
  CHECK(v(0).to_string({"g"}) == "g");

  PolyMatrix m(2, 2);
  m.set(0, 0, v(0));
  m.set(0, 1, v(1));
  m.set(1, 0, v(2));
  m.set(1, 1, v(3));
  CHECK(determinant(m) == v(0) * v(3) - v(1) * v(2));
  PolyMatrix outer(2, 2);
  outer.set(0, 0, v(0) * v(2));
  outer.set(0, 1, v(0) * v(3));
  outer.set(1, 0, v(1) * v(2));
  outer.set(1, 1, v(1) * v(3));
  CHECK(determinant(outer).is_zero());

  std::mt19937_64 rng(3);
  PolyMatrix big(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if ((i + j) % 3) big.set(i, j, v(static_cast<VarId>(4 * i + j)) + Polynomial::constant(i - j));
  auto h = oracle::random_fading(rng, 16);
  std::complex<double> det_value = determinant(big).evaluate<std::complex<double>>(h);
  CHECK(std::abs(det_value - big.evaluate(h).determinant()) < 1e-9 * (1 + std::abs(det_value)));

  CompiledPolyMatrix compiled(big);
  Eigen::MatrixXcd out;
  compiled.evaluate(h, out);
  CHECK((out - big.evaluate(h)).norm() < 1e-12);
}

TEST_CASE("prime field arithmetic") {
  CHECK(is_prime(kLargePrime));
  CHECK_FALSE(is_prime(561));
  CHECK(next_prime(8192) == 8209);
  CHECK(mul_mod(kLargePrime - 1, kLargePrime - 1, kLargePrime) == 1);
  CHECK(mul_mod(inv_mod(12345, 8209), 12345 % 8209, 8209) == 1);
  CHECK_THROWS_AS(PrimeFieldMatrix(8, FieldMatrixStorage::Zero(1, 1)), InputError);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint64_t p = trial % 2 ? 7 : 8209;
    std::uniform_int_distribution<int> dim(1, 6);
    const int r = dim(rng), c = dim(rng);
    FieldMatrixStorage a(r, c);
    std::uniform_int_distribution<std::uint64_t> val(0, p - 1);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) a(i, j) = trial % 3 ? val(rng) : val(rng) % 2;
    PrimeFieldMatrix m(p, a);
    auto w = rank_with_witness(m);
    CHECK(w.rank == reference_rank(a, p));
    if (w.rank > 0) {
      FieldMatrixStorage sub(w.rank, w.rank);
      for (int i = 0; i < w.rank; ++i)
        for (int j = 0; j < w.rank; ++j)
          sub(i, j) = a(w.rows[static_cast<std::size_t>(i)], w.cols[static_cast<std::size_t>(j)]);
      CHECK(determinant(PrimeFieldMatrix(p, sub)) != 0);
    }
  }
  FieldMatrixStorage swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(determinant(PrimeFieldMatrix(7, swap)) == 6);
}

TEST_CASE("structural rank") {
  for (int n = 1; n <= 5; ++n) {
    PolyMatrix id(n, n);
    for (int i = 0; i < n; ++i) id.set(i, i, v(static_cast<VarId>(i)));
    CHECK(structural_rank(id).rank == n);
  }
  PolyMatrix outer(2, 2);
  outer.set(0, 0, v(0) * v(2));
  outer.set(0, 1, v(0) * v(3));
  outer.set(1, 0, v(1) * v(2));
  outer.set(1, 1, v(1) * v(3));
  CHECK(structural_rank(outer).rank == 1);

  std::mt19937_64 rng(13);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = 1 + trial % 7, cols = 1 + (trial / 7) % 6;
    PolyMatrix m(rows, cols);
    std::vector<std::vector<bool>> support(static_cast<std::size_t>(rows), std::vector<bool>(static_cast<std::size_t>(cols)));
    VarId next = 0;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (coin(rng)) {
          m.set(i, j, v(next++));
          support[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        }
    auto sr = structural_rank(m);
    CHECK(sr.rank == oracle::max_matching(support));
    CHECK(sr.failure_bound <= 1e-9);
  }
  PolyMatrix empty(3, 2);
  CHECK(structural_rank(empty).rank == 0);
  CHECK(structural_rank(empty).failure_bound == 0.0);
}

TEST_CASE("maximum multiplexing gain") {
  CHECK(mmg(single_edge()).mmg == 1);
  CHECK(mmg(diamond()).mmg == 1);
  CHECK(mmg(diamond()).cuts.size() == 4);
  std::vector<EdgeSpec> edges;
  auto full = [&](int a, int na, int b, int nb) {
    for (int x = 0; x < na; ++x)
      for (int y = 0; y < nb; ++y) edges.push_back({{a, x}, {b, y}, ""});
  };
  full(0, 2, 1, 3);
  full(0, 2, 2, 3);
  full(1, 3, 3, 2);
  full(2, 3, 3, 2);
  NetworkGraph fig({node("S", Role::Source, 2), node("R1", Role::Relay, 3), node("R2", Role::Relay, 3),
                    node("D", Role::Sink, 2)},
                   edges);
  auto report = mmg(fig);
  CHECK(report.mmg == 2);
  CHECK(report.cuts.size() == 4);
  // {S} and {S, R1, R2} give 2; the mixed cuts cross two independent blocks.
  std::vector<int> ranks;
  for (const auto& c : report.cuts) ranks.push_back(c.rank.rank);
  std::sort(ranks.begin(), ranks.end());
  CHECK(ranks == std::vector<int>{2, 2, 4, 4});

  // Multicast: two sinks, the weaker one limits.
  NetworkGraph multi({node("s", Role::Source, 2), node("t1", Role::Sink, 2), node("t2", Role::Sink, 1)},
                     {{{0, 0}, {1, 0}, ""}, {{0, 1}, {1, 1}, ""}, {{0, 0}, {2, 0}, ""}, {{0, 1}, {2, 0}, ""}});
  CHECK(multicast_mmg(multi) == 1);
  CHECK(mmg(multi, Terminals{0, 1}).mmg == 2);
}

TEST_CASE("deterministic network derivation") {
  auto one = derive_deterministic(single_edge());
  CHECK(one.det.p == next_prime(std::uint64_t{1} << 13));
  CHECK(one.det.xi.size() == 1);
  CHECK(one.det.xi[0] != 0);
  CHECK(det_min_cut_rank(one.det).min_cut_rank == 1);

  auto d = derive_deterministic(diamond());
  REQUIRE(d.cuts.size() == 4);
  for (const auto& c : d.cuts) CHECK(rank(cut_matrix(d.det, c.cut)) == c.rank.rank);
  CHECK(det_min_cut_rank(d.det).min_cut_rank == 1);

  DetNetwork zero = d.det;
  std::fill(zero.xi.begin(), zero.xi.end(), 0);
  CHECK(det_min_cut_rank(zero).min_cut_rank == 0);

  std::mt19937_64 rng(23);
  oracle::RandomNetSpec spec;
  spec.max_nodes = 6;
  spec.max_antennas = 3;
  for (int i = 0; i < 10; ++i) {
    auto net = oracle::random_network(rng, spec);
    auto der = derive_deterministic(net);
    auto ranks = det_min_cut_rank(der.det);
    REQUIRE(ranks.cuts.size() == der.cuts.size());
    for (std::size_t k = 0; k < der.cuts.size(); ++k) CHECK(ranks.cuts[k].rank >= der.cuts[k].rank.rank);
  }
}

TEST_CASE("lift to fading") {
  auto one = derive_deterministic(single_edge());
  one.det.xi[0] = 3;
  auto lift = lift_to_fading(one.det, single_edge());
  CHECK(lift.assignment(0) == std::complex<double>(3.0, 0.0));
  CHECK(lift.achieved_rank == 1);
  CHECK(lift.ok);

  auto d = derive_deterministic(diamond());
  CHECK(lift_to_fading(d.det, diamond()).achieved_rank == 1);

  auto two = two_layer();
  auto der = derive_deterministic(two);
  auto l2 = lift_to_fading(der.det, two);
  CHECK(l2.ok);
  CHECK(l2.achieved_rank == 2);
  CHECK(l2.achieved_rank == mmg(two).mmg);

  Eigen::MatrixXcd m(2, 2);
  m << 1, 2, 2, 4;
  CHECK(numeric_rank(m, 1e-9) == 1);
  CHECK(numeric_rank(Eigen::MatrixXcd::Identity(3, 3), 1e-9) == 3);
  CHECK_THROWS_AS(lift_to_fading(d.det, single_edge()), InputError);
}
