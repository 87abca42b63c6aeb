#pragma once

// Structural rank of polynomial matrices, the derived finite-field
// deterministic network of a fading network, and the lift back to a complex
// fading assignment.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dmtlab/network.hpp"
#include "dmtlab/polynomial.hpp"
#include "dmtlab/prime_field.hpp"

namespace dmtlab {

struct StructuralRankOptions {
  int trials = 20;
  std::uint64_t seed = 42;
  std::uint64_t prime = kLargePrime;
};

/// Maximum rank of a polynomial matrix over all assignments, estimated as the
/// best rank over random assignments in a large prime field. The value can
/// only err low; `failure_bound` bounds that probability (Schwartz-Zippel).
struct StructuralRank {
  int rank = 0;
  std::vector<Eigen::Index> witness_rows;
  std::vector<Eigen::Index> witness_cols;
  double failure_bound = 0.0;
};

StructuralRank structural_rank(const PolyMatrix& m, const StructuralRankOptions& opts = {});

/// Entry-wise evaluation in F_p with `values[v]` substituted for variable v.
PrimeFieldMatrix evaluate_mod(const PolyMatrix& m, std::span<const std::uint64_t> values, std::uint64_t p);

struct CutRank {
  Cut cut;
  CutPattern pattern;
  StructuralRank rank;
};

struct MmgReport {
  int mmg = 0;
  std::vector<CutRank> cuts;
  /// Union bound over cuts of the per-cut failure bounds.
  double failure_bound = 0.0;
};

/// Maximum multiplexing gain: the minimum structural rank over all cuts.
MmgReport mmg(const NetworkGraph& net, Terminals t, const StructuralRankOptions& opts = {});
MmgReport mmg(const NetworkGraph& net, const StructuralRankOptions& opts = {});

/// Single-source multicast: the minimum of mmg over every sink.
int multicast_mmg(const NetworkGraph& net, const StructuralRankOptions& opts = {});

/// Finite-field image of a fading network: same topology, one field element
/// per edge in place of the fading coefficient.
struct DetNetwork {
  NetworkGraph topology;
  std::uint64_t p = 0;
  int q = 0;
  std::vector<std::uint64_t> xi;
};

struct DerivationOptions {
  std::uint64_t seed = 42;
  int attempts_per_prime = 8;
  int structural_trials = 20;
};

struct Derivation {
  DetNetwork det;
  /// Per cut: the structural rank and its full-rank witness submatrix.
  std::vector<CutRank> cuts;
  int attempts = 0;
};

/// Picks a prime from the ladder 2^13, 2^14, ... and field coefficients such
/// that every cut's witness minor is nonzero mod p, so that rank(G_cut) is at
/// least the structural rank of the fading cut matrix.
Derivation derive_deterministic(const NetworkGraph& net, Terminals t,
                                const DerivationOptions& opts = {});
Derivation derive_deterministic(const NetworkGraph& net, const DerivationOptions& opts = {});

/// Cut matrix G_cut of the deterministic network.
PrimeFieldMatrix cut_matrix(const DetNetwork& d, const Cut& cut);

struct DetCutRank {
  Cut cut;
  int rank = 0;
};

struct DetRankReport {
  /// Zero-error capacity in field symbols per channel use.
  int min_cut_rank = 0;
  std::vector<DetCutRank> cuts;
};

DetRankReport det_min_cut_rank(const DetNetwork& d, Terminals t);
DetRankReport det_min_cut_rank(const DetNetwork& d);

struct LiftedCut {
  Cut cut;
  int field_rank = 0;
  int numeric_rank = 0;
  /// Smallest retained singular value over the largest one.
  double conditioning = 0.0;
};

struct LiftReport {
  Eigen::VectorXcd assignment;
  /// Minimum numeric rank over cuts of the lifted cut matrices.
  int achieved_rank = 0;
  std::vector<LiftedCut> cuts;
  bool ok = true;
  bool ill_conditioned = false;
};

struct LiftOptions {
  double rank_threshold = 1e-9;
  /// Below this relative singular value the result is flagged ill-conditioned.
  double conditioning_warning = 1e-6;
};

/// Identifies F_p with {0, ..., p-1} and substitutes h_i = xi_i. Every lifted
/// cut matrix must have numeric rank >= its rank over F_p.
LiftReport lift_to_fading(const DetNetwork& d, const NetworkGraph& source_net, Terminals t,
                          const LiftOptions& opts = {});
LiftReport lift_to_fading(const DetNetwork& d, const NetworkGraph& source_net,
                          const LiftOptions& opts = {});

/// Numeric rank via SVD with a threshold relative to the largest singular value.
int numeric_rank(const Eigen::MatrixXcd& m, double rel_threshold, double* conditioning = nullptr);

}  // namespace dmtlab
