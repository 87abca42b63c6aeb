#pragma once

// Amplify-and-forward protocols: schedules, the induced channel they create
// between source and sink, and their DMT lower bounds.

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dmtlab/dmt_curve.hpp"
#include "dmtlab/network.hpp"
#include "dmtlab/polynomial.hpp"

namespace dmtlab {

/// A listening event of one sink antenna (a row of the induced channel).
struct Observation {
  int slot = 0;
  int antenna = 0;
};

/// A fresh data symbol sent by one source antenna (a column).
struct Emission {
  int slot = 0;
  int antenna = 0;
};

/// y = H x + z with z = w + sum_i G_i z_i: w the sink's own white noise,
/// z_i the noise picked up by relay i at its listening events. Relay gain is 1.
struct InducedChannel {
  PolyMatrix signal;
  /// One matrix per relay that ever forwards noise; columns index its
  /// listening events (slot, antenna).
  std::vector<PolyMatrix> noise_transfers;
  std::vector<NodeIndex> noise_relays;
  std::vector<Observation> rows;
  std::vector<Emission> cols;
  int total_slots = 0;

  int data_slots() const { return static_cast<int>(signal.cols()); }
};

struct ChannelBuildOptions {
  /// Drop sink observations that carry no signal at all (e.g. while a
  /// pipeline fills). Discarding observations never helps the receiver.
  bool drop_silent_rows = true;
};

/// Symbolic propagation of a schedule. In each slot every listening antenna
/// receives the sum over live incoming edges of (edge variable) x (what the
/// transmitter sends); a relay antenna sends the most recent signal it
/// received in an earlier slot.
InducedChannel build_induced_channel(const NetworkGraph& net, const Schedule& schedule, Terminals t,
                                     const ChannelBuildOptions& opts = {});
InducedChannel build_induced_channel(const NetworkGraph& net, const Schedule& schedule,
                                     const ChannelBuildOptions& opts = {});

/// Sigma = I + sum_i G_i G_i^H at a numeric assignment of the fading variables.
Eigen::MatrixXcd noise_covariance(const InducedChannel& ic,
                                  std::span<const std::complex<double>> assignment);

/// Diagonal and last nonzero sub-diagonal block parts of a
/// block-lower-triangular matrix.
struct BltParts {
  PolyMatrix diagonal;
  PolyMatrix last_subdiagonal;
  int ell = 0;
};

/// Throws InputError if `h` has a nonzero block above the diagonal.
BltParts blt_parts(const PolyMatrix& h, Eigen::Index block_rows = 1, Eigen::Index block_cols = 1);

/// A protocol instance: the network, its schedule, the induced channel, and
/// the DMT lower bound the protocol achieves.
struct ProtocolRun {
  NetworkGraph network;
  Schedule schedule;
  InducedChannel channel;
  DmtCurve<Rational> bound;
  /// Limit curve for protocols with a block-length parameter.
  std::optional<DmtCurve<Rational>> limit;
  std::vector<Path> paths;
  std::string diagnosis;
};

/// Single-relay non-orthogonal AF: two slots, the relay listens in the first
/// and forwards while the source sends a new symbol in the second.
ProtocolRun naf_single();

/// (1 - r)^+ + N (1 - 2r)^+.
DmtCurve<Rational> naf_n_relay_bound(int relays);

/// Slotted AF with isolated relays over M = k N + 1 slots.
ProtocolRun saf_matrix(int relays, int cycles);

/// (1 - r)^+ + N (1 - M r / (M - 1))^+.
DmtCurve<Rational> saf_bound(int relays, int slots);

/// d_{H_d}(r) + d_product(2r) for a single multi-antenna relay under NAF.
template <typename Scalar>
DmtCurve<Scalar> mimo_naf(int ns, int nr, int nd, const DmtCurve<Scalar>& d_product) {
  if (nr < 1) throw InputError("mimo_naf: relay antenna count must be >= 1");
  return pointwise_sum(rayleigh_mimo_dmt<Scalar>(ns, nd),
                       scale_rate(d_product, ScalarTraits<Scalar>::from_int(2)));
}

/// The MIMO NAF network and schedule. The bound uses only the direct-link
/// diagonal since the product-channel DMT is a plug-in.
ProtocolRun mimo_naf_channel(int ns, int nr, int nd);

/// d_direct(r) + inf over sum f_i r_i = 2r of sum d_i(r_i) for fixed relay
/// activation fractions f (summing to 1). Relays with f_i = 0 are idle.
template <typename Scalar>
DmtCurve<Scalar> gen_naf_bound(const DmtCurve<Scalar>& d_direct,
                               const std::vector<DmtCurve<Scalar>>& relay_curves,
                               const std::vector<Scalar>& fractions,
                               const ParallelOptions<Scalar>& opts = {}) {
  if (relay_curves.empty()) return d_direct;
  if (fractions.size() != relay_curves.size())
    throw InputError("gen_naf_bound: one fraction per relay required");
  Scalar total(0);
  std::vector<DmtCurve<Scalar>> active;
  std::vector<Scalar> weights;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (fractions[i] < Scalar(0)) throw InputError("gen_naf_bound: negative fraction");
    total += fractions[i];
    if (fractions[i] > Scalar(0)) {
      active.push_back(relay_curves[i]);
      weights.push_back(fractions[i]);
    }
  }
  if (std::abs(to_double(total) - 1.0) > 1e-9)
    throw InputError("gen_naf_bound: fractions must sum to 1");
  auto relayed = parallel_repeated(active, weights, opts);
  return pointwise_sum(d_direct, scale_rate(relayed, ScalarTraits<Scalar>::from_int(2)));
}

struct GenNafOptions {
  int resolution = 50;
  int refinement_rounds = 3;
  double r_step = 0.01;
};

/// Pointwise best activation fractions for gen_naf_bound on an r grid.
struct GenNafOptimum {
  std::vector<double> r;
  std::vector<double> d;
  std::vector<std::vector<double>> fractions;
  DmtCurve<double> curve;
};

GenNafOptimum gen_naf_optimize(const DmtCurve<double>& d_direct,
                               const std::vector<DmtCurve<double>>& relay_curves,
                               const GenNafOptions& opts = {});

/// Activates the edges of each edge-disjoint path one at a time. With m paths
/// of total length N the induced channel is diagonal in the path products and
/// the DMT is (m - N r)^+.
ProtocolRun edge_disjoint_protocol(const NetworkGraph& net, Terminals t);
ProtocolRun edge_disjoint_protocol(const NetworkGraph& net);

/// Full-duplex protocol for single-antenna networks that are acyclic or have
/// M edge-disjoint paths without shortcuts: each path is active for T slots,
/// the source sending T - D symbols and then D zeros (D = longest path).
/// bound = M (1 - M T r / (M (T - D)))^+, limit = M (1 - r)^+. A
/// non-positive slots_per_path means T = inf: only the limit is computed and
/// bound = limit.
ProtocolRun fd_linear_protocol(const NetworkGraph& net, int slots_per_path, Terminals t);
ProtocolRun fd_linear_protocol(const NetworkGraph& net, int slots_per_path);

/// Reference channels for simulation: one Rayleigh coefficient, and M
/// independent coefficients in parallel within one channel use.
InducedChannel scalar_channel();
InducedChannel parallel_channel(int branches);

}  // namespace dmtlab
