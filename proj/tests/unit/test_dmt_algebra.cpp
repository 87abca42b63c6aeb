#include <doctest.h>

#include <cmath>
#include <random>

#include "dmtlab/dmt_curve.hpp"
#include "dmtlab/error.hpp"
#include "dmtlab/extreme_points.hpp"
#include "oracles.hpp"

using namespace dmtlab;
using R = Rational;
using Curve = DmtCurve<R>;

namespace {

Curve ramp(R d0, R r_max) { return Curve::ramp(d0, r_max); }

Curve curve(std::vector<Breakpoint<R>> pts) { return Curve(std::move(pts)); }

}  // namespace

TEST_CASE("curve normalization") {
  CHECK_THROWS_AS(Curve({{R(1), R(1)}, {R(2), R(0)}}), InputError);
  CHECK_THROWS_AS(Curve({{R(0), R(0)}, {R(1), R(1)}}), InputError);
  CHECK_THROWS_AS(Curve({{R(0), R(1)}}), InputError);
  auto c = curve({{R(0), R(2)}, {R(1), R(1)}, {R(2), R(0)}, {R(3), R(0)}});
  CHECK(c.breakpoints().size() == 2);
  CHECK(c.r_max() == R(2));
  CHECK(c(R(1, 2)) == R(3, 2));
  CHECK(c(R(5)) == R(0));
}

TEST_CASE("Rayleigh MIMO curves") {
  CHECK(rayleigh_mimo_dmt(1, 1) == ramp(R(1), R(1)));
  CHECK(rayleigh_mimo_dmt(2, 2) == curve({{R(0), R(4)}, {R(1), R(1)}, {R(2), R(0)}}));
  for (int n = 1; n <= 4; ++n) CHECK(rayleigh_mimo_dmt(1, n) == ramp(R(n), R(1)));
  for (int hops : {1, 3}) CHECK(scalar_rayleigh_product_dmt(hops) == ramp(R(1), R(1)));
  CHECK(scalar_rayleigh_product_dmt(2)(R(1, 2)) == R(1, 2));
}

TEST_CASE("parallel channels") {
  std::vector<Curve> one{rayleigh_mimo_dmt(2, 2)};
  CHECK(parallel_dmt(one) == one[0]);
  std::vector<Curve> twice{ramp(R(1), R(1)), ramp(R(1), R(1))};
  CHECK(parallel_dmt(twice) == ramp(R(2), R(2)));

  std::vector<DmtCurve<double>> mixed{DmtCurve<double>::ramp(1, 1), DmtCurve<double>::ramp(2, 1)};
  auto conv = parallel_dmt(mixed);
  for (int k = 0; k <= 20; ++k) {
    double r = 0.1 * k;
    CHECK(std::abs(conv(r) - oracle::grid_inf_convolution(mixed, r, 1e-3)) <= 2e-3);
  }

  std::vector<Curve> alloc_in{ramp(R(1), R(1)), ramp(R(2), R(1))};
  auto a = optimal_allocation<R>(alloc_in, R(1, 2));
  CHECK(a.rates[0] == R(0));
  CHECK(a.rates[1] == R(1, 2));
  CHECK(alloc_in[0](a.rates[0]) + alloc_in[1](a.rates[1]) == parallel_dmt(alloc_in)(R(1, 2)));

  std::vector<Curve> bad{curve({{R(0), R(2)}, {R(1), R(3, 2)}, {R(2), R(0)}})};
  CHECK_THROWS_AS(parallel_dmt(bad), InputError);
  ParallelOptions<R> opts;
  opts.allow_nonconvex = true;
  opts.grid_step = R(1, 10);
  auto grid = parallel_dmt(std::vector<Curve>{bad[0], ramp(R(1), R(1))}, opts);
  CHECK(grid(R(0)) == R(3));
}

TEST_CASE("identical and repeated parallel channels") {
  auto mimo = rayleigh_mimo_dmt(2, 2);
  CHECK(parallel_identical(mimo, 1) == mimo);
  for (int m = 1; m <= 5; ++m) CHECK(parallel_identical(ramp(R(1), R(1)), m) == ramp(R(m), R(m)));
  CHECK(parallel_identical(mimo, 2) == parallel_dmt(std::vector<Curve>{mimo, mimo}));

  std::vector<Curve> curves{ramp(R(1), R(1)), rayleigh_mimo_dmt(2, 1)};
  CHECK(parallel_repeated(curves, std::vector<R>{R(1), R(1)}) == parallel_dmt(curves));
  CHECK(parallel_repeated(std::vector<Curve>{ramp(R(1), R(1))}, std::vector<R>{R(3)}) == ramp(R(1), R(3)));

  // M paths, each coefficient repeated T - D times.
  for (int m = 1; m <= 3; ++m)
    for (int reps : {1, 4, 7}) {
      std::vector<Curve> paths(static_cast<std::size_t>(m), ramp(R(1), R(1)));
      std::vector<R> mult(static_cast<std::size_t>(m), R(reps));
      CHECK(parallel_repeated(paths, mult) == ramp(R(m), R(m * reps)));
    }
}

TEST_CASE("block-lower-triangular bound and rate scaling") {
  auto diag = ramp(R(1), R(2));
  auto sub = ramp(R(1), R(1));
  auto sum = blt_lower_bound(diag, sub, true);
  CHECK(sum == curve({{R(0), R(2)}, {R(1), R(1, 2)}, {R(2), R(0)}}));
  CHECK(blt_lower_bound(sub, sub, false) == sub);
  CHECK(blt_lower_bound(diag, Curve(), true) == diag);
  CHECK(blt_lower_bound(diag, sub, false) == diag);

  CHECK(scale_rate(sum, 3, 3) == sum);
  CHECK(scale_rate(sum, 2, 1) == pointwise_sum(ramp(R(1), R(1)), ramp(R(1), R(1, 2))));
  for (int m = 1; m <= 3; ++m)
    for (int t = 3; t <= 6; ++t) {
      const int d = 2;
      auto h0 = ramp(R(m), R(m * (t - d)));
      auto expected = ramp(R(m), R(m * (t - d), m * t));
      CHECK(scale_rate(h0, m * t, 1) == expected);
    }
  CHECK_THROWS_AS(scale_rate(sum, 1, 2), InputError);
}

TEST_CASE("pointwise max splits at crossings") {
  auto a = ramp(R(2), R(1));
  auto b = ramp(R(1), R(3));
  auto m = pointwise_max(a, b);
  CHECK(m(R(1, 2)) == R(1));
  CHECK(m(R(3, 5)) == R(4, 5));
  CHECK(m(R(2)) == R(1, 3));
}

TEST_CASE("export sampling") {
  auto s = sample_curve(ramp(R(2), R(1, 3)), 0.25);
  REQUIRE(s.size() == 3);
  CHECK(s[1].first == doctest::Approx(0.25));
  CHECK(s[2].first == doctest::Approx(1.0 / 3));
  CHECK(s[2].second == 0.0);
}

TEST_CASE("extreme points") {
  NetworkGraph one({{"s", 1, Role::Source, Duplex::Full}, {"t", 1, Role::Sink, Duplex::Full}}, {{{0, 0}, {1, 0}, ""}});
  auto e = extreme_points(one);
  CHECK(e.d_max == 1);
  CHECK(e.r_max == 1);

  NetworkGraph diamond({{"s", 1, Role::Source, Duplex::Full}, {"a", 1, Role::Relay, Duplex::Full},
                        {"b", 1, Role::Relay, Duplex::Full}, {"t", 1, Role::Sink, Duplex::Full}},
                       {{{0, 0}, {1, 0}, ""}, {{0, 0}, {2, 0}, ""}, {{1, 0}, {3, 0}, ""}, {{2, 0}, {3, 0}, ""}});
  e = extreme_points(diamond);
  CHECK(e.d_max == oracle::brute_force_min_cut(diamond));
  CHECK(e.d_max == 2);
  CHECK(e.r_max == 1);

  auto bound = cutset_bound(one, default_terminals(one));
  REQUIRE(bound.curve);
  CHECK(*bound.curve == ramp(R(1), R(1)));
}
