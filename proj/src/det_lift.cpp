#include "dmtlab/det_lift.hpp"

#include <algorithm>
#include <random>

#include <Eigen/SVD>

#include "dmtlab/error.hpp"

namespace dmtlab {

namespace {

// First prime >= 2^k for k = 13 .. 61.
std::vector<std::uint64_t> prime_ladder() {
  std::vector<std::uint64_t> ladder;
  for (int k = 13; k <= 61; ++k) ladder.push_back(next_prime(std::uint64_t{1} << k));
  return ladder;
}

}  // namespace

Derivation derive_deterministic(const NetworkGraph& net, Terminals t, const DerivationOptions& opts) {
  StructuralRankOptions sr;
  sr.seed = opts.seed;
  sr.trials = opts.structural_trials;
  Derivation out;
  out.cuts = mmg(net, t, sr).cuts;

  // Witness submatrix of each cut; its determinant is checked at the candidate point.
  std::vector<PolyMatrix> minors;
  for (const auto& c : out.cuts) {
    if (c.rank.rank == 0) continue;
    minors.push_back(c.pattern.matrix.submatrix(c.rank.witness_rows, c.rank.witness_cols));
  }

  out.det.topology = net;
  out.det.q = net.max_antennas();
  const auto n = static_cast<std::size_t>(net.edge_count());
  std::uint64_t stream = 0;
  for (std::uint64_t p : prime_ladder()) {
    std::uniform_int_distribution<std::uint64_t> dist(0, p - 1);
    for (int a = 0; a < opts.attempts_per_prime; ++a) {
      std::seed_seq seq{opts.seed, stream++};
      std::mt19937_64 rng(seq);
      std::vector<std::uint64_t> xi(n);
      for (auto& x : xi) x = dist(rng);
      ++out.attempts;
      bool all_nonzero = std::all_of(minors.begin(), minors.end(),
                                     [&](const PolyMatrix& m) { return determinant(evaluate_mod(m, xi, p)) != 0; });
      if (all_nonzero) {
        out.det.p = p;
        out.det.xi = std::move(xi);
        return out;
      }
    }
  }
  throw InfeasibleError("derive_deterministic: no coefficient assignment found below 2^62");
}

Derivation derive_deterministic(const NetworkGraph& net, const DerivationOptions& opts) {
  return derive_deterministic(net, default_terminals(net), opts);
}

PrimeFieldMatrix cut_matrix(const DetNetwork& d, const Cut& cut) {
  if (d.xi.size() != static_cast<std::size_t>(d.topology.edge_count()))
    throw InputError("DetNetwork: one coefficient per edge required");
  return evaluate_mod(cut_transfer_pattern(d.topology, cut).matrix, d.xi, d.p);
}

DetRankReport det_min_cut_rank(const DetNetwork& d, Terminals t) {
  DetRankReport report;
  bool first = true;
  for (auto& cut : enumerate_cuts(d.topology, t)) {
    int r = rank(cut_matrix(d, cut));
    if (first || r < report.min_cut_rank) report.min_cut_rank = r;
    first = false;
    report.cuts.push_back({std::move(cut), r});
  }
  return report;
}

DetRankReport det_min_cut_rank(const DetNetwork& d) {
  return det_min_cut_rank(d, default_terminals(d.topology));
}

int numeric_rank(const Eigen::MatrixXcd& m, double rel_threshold, double* conditioning) {
  if (conditioning) *conditioning = 0.0;
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_threshold * s(0)) ++r;
  if (conditioning) *conditioning = s(r - 1) / s(0);
  return r;
}

LiftReport lift_to_fading(const DetNetwork& d, const NetworkGraph& source_net, Terminals t,
                          const LiftOptions& opts) {
  if (source_net.edge_count() != d.topology.edge_count() || source_net.node_count() != d.topology.node_count())
    throw InputError("lift_to_fading: deterministic network does not mirror the source network");
  LiftReport report;
  report.assignment.resize(source_net.edge_count());
  for (Eigen::Index i = 0; i < report.assignment.size(); ++i)
    report.assignment(i) = {static_cast<double>(d.xi[static_cast<std::size_t>(i)]), 0.0};
  bool first = true;
  for (auto& cut : enumerate_cuts(source_net, t)) {
    LiftedCut lc;
    lc.field_rank = rank(cut_matrix(d, cut));
    Eigen::MatrixXcd h = cut_transfer_pattern(source_net, cut).matrix.evaluate(report.assignment);
    lc.numeric_rank = numeric_rank(h, opts.rank_threshold, &lc.conditioning);
    if (lc.numeric_rank < lc.field_rank) report.ok = false;
    if (lc.numeric_rank > 0 && lc.conditioning < opts.conditioning_warning) report.ill_conditioned = true;
    if (first || lc.numeric_rank < report.achieved_rank) report.achieved_rank = lc.numeric_rank;
    first = false;
    lc.cut = std::move(cut);
    report.cuts.push_back(std::move(lc));
  }
  return report;
}

LiftReport lift_to_fading(const DetNetwork& d, const NetworkGraph& source_net, const LiftOptions& opts) {
  return lift_to_fading(d, source_net, default_terminals(source_net), opts);
}

}  // namespace dmtlab
