#pragma once

#include <optional>

#include "dmtlab/det_lift.hpp"
#include "dmtlab/dmt_curve.hpp"
#include "dmtlab/network.hpp"

namespace dmtlab {

/// The two endpoints of a network's DMT: maximum diversity (min-cut) and
/// maximum multiplexing gain (min-cut structural rank).
struct ExtremePoints {
  int d_max = 0;
  int r_max = 0;
  /// Set for networks with half-duplex nodes, where the cut rank only bounds r_max.
  bool r_max_upper_bound_only = false;
};

ExtremePoints extreme_points(const NetworkGraph& net, Terminals t,
                             const StructuralRankOptions& opts = {});
ExtremePoints extreme_points(const NetworkGraph& net, const StructuralRankOptions& opts = {});

/// Cut-set upper bound on the DMT. A full curve is available only from cuts
/// whose pattern is a complete i.i.d. block (an m x n Rayleigh channel);
/// other cuts contribute only their endpoints.
struct CutsetBound {
  ExtremePoints endpoints;
  /// Pointwise minimum over complete-block cuts, if any.
  std::optional<DmtCurve<Rational>> curve;
  int complete_block_cuts = 0;
};

CutsetBound cutset_bound(const NetworkGraph& net, Terminals t,
                         const StructuralRankOptions& opts = {});

}  // namespace dmtlab
