#include "dmtlab/extreme_points.hpp"

#include <set>

namespace dmtlab {

ExtremePoints extreme_points(const NetworkGraph& net, Terminals t, const StructuralRankOptions& opts) {
  ExtremePoints e;
  e.d_max = min_cut_edges(net, t).edges;
  e.r_max = mmg(net, t, opts).mmg;
  e.r_max_upper_bound_only = !net.all_full_duplex();
  return e;
}

ExtremePoints extreme_points(const NetworkGraph& net, const StructuralRankOptions& opts) {
  return extreme_points(net, default_terminals(net), opts);
}

namespace {

// Every entry present and each a distinct single variable.
bool complete_block(const PolyMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return false;
  if (static_cast<Eigen::Index>(m.entries().size()) != m.rows() * m.cols()) return false;
  std::set<VarId> seen;
  for (const auto& [rc, p] : m.entries()) {
    if (p.terms().size() != 1) return false;
    const auto& [mono, coef] = *p.terms().begin();
    if (coef != 1 || mono.degree() != 1) return false;
    if (!seen.insert(mono.powers().front().first).second) return false;
  }
  return true;
}

}  // namespace

CutsetBound cutset_bound(const NetworkGraph& net, Terminals t, const StructuralRankOptions& opts) {
  CutsetBound b;
  b.endpoints = extreme_points(net, t, opts);
  for (const auto& cut : enumerate_cuts(net, t)) {
    const auto pattern = cut_transfer_pattern(net, cut);
    if (cut.crossing_edges.empty()) {
      b.curve = DmtCurve<Rational>();
      continue;
    }
    if (!complete_block(pattern.matrix)) continue;
    ++b.complete_block_cuts;
    auto c = rayleigh_mimo_dmt<Rational>(static_cast<int>(pattern.matrix.cols()),
                                         static_cast<int>(pattern.matrix.rows()));
    b.curve = b.curve ? pointwise_min(*b.curve, c) : c;
  }
  return b;
}

}  // namespace dmtlab
