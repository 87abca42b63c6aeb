#pragma once

// Piecewise-linear diversity-multiplexing tradeoff curves and their calculus.
//
// A DmtCurve is a continuous, nonincreasing, piecewise-linear function d(r)
// on [0, r_max] that is zero from r_max onward. Everything is templated on
// the scalar type so that curves with rational breakpoints can be combined
// exactly (Scalar = Rational) while plug-in curves read from files use
// double.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dmtlab/error.hpp"
#include "dmtlab/scalar.hpp"

namespace dmtlab {

template <typename Scalar>
struct Breakpoint {
  Scalar r;
  Scalar d;
  bool operator==(const Breakpoint&) const = default;
};

template <typename Scalar>
class DmtCurve {
 public:
  using Point = Breakpoint<Scalar>;

  /// The zero curve d(r) = 0.
  DmtCurve() : pts_{Point{Scalar(0), Scalar(0)}} {}

  explicit DmtCurve(std::vector<Point> pts) : pts_(std::move(pts)) { normalize(); }

  /// d0 * (1 - r / r_max)^+.
  static DmtCurve ramp(const Scalar& d0, const Scalar& r_max) {
    if (d0 < Scalar(0) || r_max < Scalar(0)) throw InputError("ramp: negative parameter");
    if (d0 == Scalar(0) || r_max == Scalar(0)) return DmtCurve();
    return DmtCurve({{Scalar(0), d0}, {r_max, Scalar(0)}});
  }

  const std::vector<Point>& breakpoints() const { return pts_; }
  const Scalar& r_max() const { return pts_.back().r; }
  const Scalar& d_max() const { return pts_.front().d; }

  Scalar operator()(const Scalar& r) const {
    if (r <= pts_.front().r) return pts_.front().d;
    if (r >= pts_.back().r) return Scalar(0);
    auto hi = std::upper_bound(pts_.begin(), pts_.end(), r,
                               [](const Scalar& x, const Point& p) { return x < p.r; });
    auto lo = hi - 1;
    return lo->d + (hi->d - lo->d) * (r - lo->r) / (hi->r - lo->r);
  }

  /// Slope of each finite segment, left to right.
  std::vector<Scalar> slopes() const {
    std::vector<Scalar> s;
    for (std::size_t i = 0; i + 1 < pts_.size(); ++i)
      s.push_back((pts_[i + 1].d - pts_[i].d) / (pts_[i + 1].r - pts_[i].r));
    return s;
  }

  /// Convex on [0, inf), including the kink into the zero tail.
  bool is_convex() const {
    auto s = slopes();
    s.push_back(Scalar(0));
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
      if (s[i] > s[i + 1] + ScalarTraits<Scalar>::eps()) return false;
    return true;
  }

  template <typename Other>
  DmtCurve<Other> cast() const {
    std::vector<Breakpoint<Other>> out;
    out.reserve(pts_.size());
    for (const auto& p : pts_) out.push_back({Other(to_double(p.r)), Other(to_double(p.d))});
    return DmtCurve<Other>(std::move(out));
  }

  bool operator==(const DmtCurve&) const = default;

 private:
  void normalize() {
    const Scalar eps = ScalarTraits<Scalar>::eps();
    if (pts_.empty()) throw InputError("DmtCurve: no breakpoints");
    if (pts_.front().r != Scalar(0)) throw InputError("DmtCurve: first breakpoint must be at r = 0");
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (pts_[i].d < -eps) throw InputError("DmtCurve: negative diversity");
      if (pts_[i].d < Scalar(0)) pts_[i].d = Scalar(0);
      if (i == 0) continue;
      if (!(pts_[i].r > pts_[i - 1].r)) throw InputError("DmtCurve: r must be strictly increasing");
      if (pts_[i].d > pts_[i - 1].d + eps) throw InputError("DmtCurve: d must be nonincreasing");
      if (pts_[i].d > pts_[i - 1].d) pts_[i].d = pts_[i - 1].d;
    }
    if (pts_.back().d > eps) throw InputError("DmtCurve: curve must reach d = 0");
    pts_.back().d = Scalar(0);

    // Truncate at the first zero and drop collinear interior points.
    auto first_zero = std::find_if(pts_.begin(), pts_.end(),
                                   [&](const Point& p) { return p.d <= eps; });
    first_zero->d = Scalar(0);
    pts_.erase(first_zero + 1, pts_.end());
    std::vector<Point> kept;
    kept.reserve(pts_.size());
    for (const auto& p : pts_) {
      while (kept.size() >= 2) {
        const Point& a = kept[kept.size() - 2];
        const Point& b = kept.back();
        Scalar cross = (b.r - a.r) * (p.d - a.d) - (p.r - a.r) * (b.d - a.d);
        Scalar scale = (p.r - a.r) * (a.d > Scalar(1) ? a.d : Scalar(1));
        if (cross < Scalar(0)) cross = -cross;
        if (cross > eps * scale) break;
        kept.pop_back();
      }
      kept.push_back(p);
    }
    pts_ = std::move(kept);
  }

  std::vector<Point> pts_;
};

/// One optimal split of a total multiplexing gain across parallel subchannels.
template <typename Scalar>
struct RateAllocation {
  std::vector<Scalar> rates;
  Scalar total{0};
};

template <typename Scalar>
bool approx_equal(const DmtCurve<Scalar>& a, const DmtCurve<Scalar>& b, double tol = 1e-9) {
  const auto ad = a.template cast<double>();
  const auto bd = b.template cast<double>();
  std::vector<double> rs;
  for (const auto& p : ad.breakpoints()) rs.push_back(p.r);
  for (const auto& p : bd.breakpoints()) rs.push_back(p.r);
  for (double r : rs) {
    double da = ad(r);
    double db = bd(r);
    if (std::abs(da - db) > tol * std::max(1.0, std::abs(da))) return false;
  }
  return true;
}

namespace detail {

template <typename Scalar, typename Op>
DmtCurve<Scalar> combine_pointwise(const DmtCurve<Scalar>& a, const DmtCurve<Scalar>& b, Op op,
                                   bool split_at_crossings) {
  std::vector<Scalar> rs;
  for (const auto& p : a.breakpoints()) rs.push_back(p.r);
  for (const auto& p : b.breakpoints()) rs.push_back(p.r);
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  if (split_at_crossings) {
    std::vector<Scalar> extra;
    for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
      Scalar g0 = a(rs[i]) - b(rs[i]);
      Scalar g1 = a(rs[i + 1]) - b(rs[i + 1]);
      if ((g0 < Scalar(0) && g1 > Scalar(0)) || (g0 > Scalar(0) && g1 < Scalar(0)))
        extra.push_back(rs[i] + (rs[i + 1] - rs[i]) * g0 / (g0 - g1));
    }
    rs.insert(rs.end(), extra.begin(), extra.end());
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  }
  std::vector<Breakpoint<Scalar>> pts;
  pts.reserve(rs.size());
  for (const auto& r : rs) pts.push_back({r, op(a(r), b(r))});
  return DmtCurve<Scalar>(std::move(pts));
}

struct Segment {
  std::size_t curve;
  std::size_t index;
};

}  // namespace detail

template <typename Scalar>
DmtCurve<Scalar> pointwise_sum(const DmtCurve<Scalar>& a, const DmtCurve<Scalar>& b) {
  return detail::combine_pointwise(a, b, [](const Scalar& x, const Scalar& y) { return x + y; }, false);
}

template <typename Scalar>
DmtCurve<Scalar> pointwise_max(const DmtCurve<Scalar>& a, const DmtCurve<Scalar>& b) {
  return detail::combine_pointwise(
      a, b, [](const Scalar& x, const Scalar& y) { return x < y ? y : x; }, true);
}

template <typename Scalar>
DmtCurve<Scalar> pointwise_min(const DmtCurve<Scalar>& a, const DmtCurve<Scalar>& b) {
  return detail::combine_pointwise(
      a, b, [](const Scalar& x, const Scalar& y) { return y < x ? y : x; }, true);
}

/// d(r) of an m-transmit, n-receive i.i.d. Rayleigh channel: the piecewise
/// linear curve through (k, (m-k)(n-k)), k = 0..min(m, n).
template <typename Scalar = Rational>
DmtCurve<Scalar> rayleigh_mimo_dmt(int m, int n) {
  if (m < 1 || n < 1) throw InputError("rayleigh_mimo_dmt: antenna counts must be >= 1");
  std::vector<Breakpoint<Scalar>> pts;
  for (int k = 0; k <= std::min(m, n); ++k)
    pts.push_back({Scalar(k), Scalar(static_cast<std::int64_t>(m - k) * (n - k))});
  return DmtCurve<Scalar>(std::move(pts));
}

/// A product of scalar Rayleigh factors has the same DMT (1 - r)^+ as one factor.
template <typename Scalar = Rational>
DmtCurve<Scalar> scalar_rayleigh_product_dmt(int n_hops) {
  if (n_hops < 1) throw InputError("scalar_rayleigh_product_dmt: n_hops must be >= 1");
  return DmtCurve<Scalar>::ramp(Scalar(1), Scalar(1));
}

/// r -> curve(factor * r).
template <typename Scalar>
DmtCurve<Scalar> scale_rate(const DmtCurve<Scalar>& curve, const Scalar& factor) {
  if (!(factor > Scalar(0))) throw InputError("scale_rate: factor must be positive");
  std::vector<Breakpoint<Scalar>> pts;
  for (const auto& p : curve.breakpoints()) pts.push_back({p.r / factor, p.d});
  return DmtCurve<Scalar>(std::move(pts));
}

/// Rate loss of a protocol that spends `slots` channel uses per `data_slots`
/// uses of the induced matrix: r -> curve((slots / data_slots) * r).
template <typename Scalar>
DmtCurve<Scalar> scale_rate(const DmtCurve<Scalar>& curve, int slots, int data_slots) {
  if (data_slots < 1 || slots < data_slots)
    throw InputError("scale_rate: need slots >= data_slots >= 1");
  return scale_rate(curve, ScalarTraits<Scalar>::ratio(slots, data_slots));
}

/// inf over r_1 + r_2 = r of a(r_1) + b(r_2), brute force on a grid of step
/// `step`. Used for curves that are not convex.
template <typename Scalar>
DmtCurve<Scalar> inf_convolve_grid(const DmtCurve<Scalar>& a, const DmtCurve<Scalar>& b,
                                   const Scalar& step) {
  const Scalar total = a.r_max() + b.r_max();
  std::vector<Scalar> grid;
  for (std::int64_t k = 0;; ++k) {
    Scalar r = step * Scalar(k);
    if (!(r < total)) break;
    grid.push_back(r);
  }
  std::vector<Breakpoint<Scalar>> pts;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    Scalar best = a(Scalar(0)) + b(grid[k]);
    for (std::size_t j = 1; j <= k; ++j) {
      Scalar v = a(grid[j]) + b(grid[k] - grid[j]);
      if (v < best) best = v;
    }
    if (!pts.empty() && best > pts.back().d) best = pts.back().d;
    pts.push_back({grid[k], best});
  }
  pts.push_back({total, Scalar(0)});
  return DmtCurve<Scalar>(std::move(pts));
}

template <typename Scalar>
struct ParallelOptions {
  /// Accept non-convex inputs and handle them by grid search.
  bool allow_nonconvex = false;
  Scalar grid_step = ScalarTraits<Scalar>::ratio(1, 1000);
};

namespace detail {

template <typename Scalar>
std::vector<Segment> segments_by_slope(std::span<const DmtCurve<Scalar>> curves,
                                       std::vector<std::vector<Scalar>>& slopes) {
  std::vector<Segment> segs;
  slopes.clear();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    slopes.push_back(curves[i].slopes());
    for (std::size_t j = 0; j < slopes.back().size(); ++j) segs.push_back({i, j});
  }
  std::stable_sort(segs.begin(), segs.end(), [&](const Segment& x, const Segment& y) {
    return slopes[x.curve][x.index] < slopes[y.curve][y.index];
  });
  return segs;
}

}  // namespace detail

/// DMT of a parallel channel of independent subchannels:
/// inf over r_1 + ... + r_M = r of sum_i d_i(r_i).
///
/// For convex inputs the infimal convolution is exact: the segments of all
/// curves are concatenated in order of increasing slope, starting from
/// sum_i d_i(0).
template <typename Scalar>
DmtCurve<Scalar> parallel_dmt(std::span<const DmtCurve<Scalar>> curves,
                              const ParallelOptions<Scalar>& opts = {}) {
  if (curves.empty()) return DmtCurve<Scalar>();
  std::vector<DmtCurve<Scalar>> convex, other;
  for (const auto& c : curves) (c.is_convex() ? convex : other).push_back(c);
  if (!other.empty() && !opts.allow_nonconvex)
    throw InputError("parallel_dmt: non-convex input curve (enable the grid fallback)");

  DmtCurve<Scalar> result;
  if (!convex.empty()) {
    std::vector<std::vector<Scalar>> slopes;
    auto segs = detail::segments_by_slope<Scalar>(convex, slopes);
    Scalar r(0), d(0);
    for (const auto& c : convex) d += c.d_max();
    std::vector<Breakpoint<Scalar>> pts{{r, d}};
    for (const auto& s : segs) {
      const auto& bp = convex[s.curve].breakpoints();
      r += bp[s.index + 1].r - bp[s.index].r;
      d += bp[s.index + 1].d - bp[s.index].d;
      pts.push_back({r, d});
    }
    pts.back().d = Scalar(0);
    result = DmtCurve<Scalar>(std::move(pts));
  }
  for (std::size_t i = 0; i < other.size(); ++i) {
    if (convex.empty() && i == 0) {
      result = other[0];
      continue;
    }
    result = inf_convolve_grid(result, other[i], opts.grid_step);
  }
  return result;
}

template <typename Scalar>
DmtCurve<Scalar> parallel_dmt(const std::vector<DmtCurve<Scalar>>& curves,
                              const ParallelOptions<Scalar>& opts = {}) {
  return parallel_dmt(std::span<const DmtCurve<Scalar>>(curves), opts);
}

/// An allocation attaining the infimum in parallel_dmt at total rate r.
/// Convex inputs only. Rate beyond the combined r_max is given to the first
/// subchannel (every allocation there has zero diversity).
template <typename Scalar>
RateAllocation<Scalar> optimal_allocation(std::span<const DmtCurve<Scalar>> curves,
                                          const Scalar& r) {
  for (const auto& c : curves)
    if (!c.is_convex()) throw InputError("optimal_allocation: non-convex input curve");
  RateAllocation<Scalar> alloc;
  alloc.rates.assign(curves.size(), Scalar(0));
  alloc.total = r;
  if (curves.empty()) return alloc;
  std::vector<std::vector<Scalar>> slopes;
  auto segs = detail::segments_by_slope(curves, slopes);
  Scalar remaining = r;
  for (const auto& s : segs) {
    if (!(remaining > Scalar(0))) break;
    const auto& bp = curves[s.curve].breakpoints();
    Scalar len = bp[s.index + 1].r - bp[s.index].r;
    Scalar take = remaining < len ? remaining : len;
    alloc.rates[s.curve] += take;
    remaining -= take;
  }
  if (remaining > Scalar(0)) alloc.rates[0] += remaining;
  return alloc;
}

/// M identical independent subchannels: M * d(r / M).
template <typename Scalar>
DmtCurve<Scalar> parallel_identical(const DmtCurve<Scalar>& curve, int copies) {
  if (copies < 1) throw InputError("parallel_identical: copies must be >= 1");
  if (!curve.is_convex())
    throw InputError("parallel_identical: curve is not convex, symmetric allocation is not optimal");
  const Scalar m = ScalarTraits<Scalar>::from_int(copies);
  std::vector<Breakpoint<Scalar>> pts;
  for (const auto& p : curve.breakpoints()) pts.push_back({p.r * m, p.d * m});
  return DmtCurve<Scalar>(std::move(pts));
}

/// Stretches the r-axis: r -> curve(r / n).
template <typename Scalar>
DmtCurve<Scalar> stretch_rate(const DmtCurve<Scalar>& curve, const Scalar& n) {
  if (!(n > Scalar(0))) throw InputError("stretch_rate: factor must be positive");
  std::vector<Breakpoint<Scalar>> pts;
  for (const auto& p : curve.breakpoints()) pts.push_back({p.r * n, p.d});
  return DmtCurve<Scalar>(std::move(pts));
}

/// Parallel channel whose i-th coefficient block repeats n_i times:
/// inf over sum_i n_i r_i = r of sum_i d_i(r_i).
template <typename Scalar>
DmtCurve<Scalar> parallel_repeated(std::span<const DmtCurve<Scalar>> curves,
                                   std::span<const Scalar> multiplicities,
                                   const ParallelOptions<Scalar>& opts = {}) {
  if (curves.size() != multiplicities.size())
    throw InputError("parallel_repeated: curve and multiplicity counts differ");
  std::vector<DmtCurve<Scalar>> stretched;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    if (!(multiplicities[i] > Scalar(0)))
      throw InputError("parallel_repeated: multiplicities must be positive");
    stretched.push_back(stretch_rate(curves[i], multiplicities[i]));
  }
  return parallel_dmt<Scalar>(stretched, opts);
}

template <typename Scalar>
DmtCurve<Scalar> parallel_repeated(const std::vector<DmtCurve<Scalar>>& curves,
                                   const std::vector<Scalar>& multiplicities,
                                   const ParallelOptions<Scalar>& opts = {}) {
  return parallel_repeated(std::span<const DmtCurve<Scalar>>(curves),
                           std::span<const Scalar>(multiplicities), opts);
}

/// Lower bound on the DMT of a block-lower-triangular matrix from the DMTs of
/// its diagonal and last sub-diagonal parts. Independent parts add; otherwise
/// the better of the two bounds holds.
template <typename Scalar>
DmtCurve<Scalar> blt_lower_bound(const DmtCurve<Scalar>& d_diag, const DmtCurve<Scalar>& d_subdiag,
                                 bool independent) {
  return independent ? pointwise_sum(d_diag, d_subdiag) : pointwise_max(d_diag, d_subdiag);
}

/// Export grid: every breakpoint plus a uniform grid of `step` on [0, r_max].
template <typename Scalar>
std::vector<std::pair<double, double>> sample_curve(const DmtCurve<Scalar>& curve, double step) {
  if (!(step > 0)) throw InputError("sample_curve: step must be positive");
  const double r_max = to_double(curve.r_max());
  std::vector<double> rs;
  for (const auto& p : curve.breakpoints()) rs.push_back(to_double(p.r));
  const auto n = static_cast<std::int64_t>(std::floor(r_max / step + 1e-9));
  for (std::int64_t k = 0; k <= n; ++k) rs.push_back(static_cast<double>(k) * step);
  std::sort(rs.begin(), rs.end());
  // Evaluate in double so grid points need not be representable exactly.
  const auto as_double = curve.template cast<double>();
  std::vector<std::pair<double, double>> out;
  for (double r : rs) {
    if (!out.empty() && std::abs(r - out.back().first) < 1e-12) continue;
    out.emplace_back(r, as_double(r));
  }
  return out;
}

}  // namespace dmtlab
