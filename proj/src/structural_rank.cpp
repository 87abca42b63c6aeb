#include <algorithm>
#include <cmath>
#include <random>

#include "dmtlab/det_lift.hpp"
#include "dmtlab/error.hpp"

namespace dmtlab {

namespace {

std::vector<std::uint64_t> random_field_values(std::mt19937_64& rng, std::size_t n, std::uint64_t p) {
  std::uniform_int_distribution<std::uint64_t> dist(0, p - 1);
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

std::size_t variable_span(const PolyMatrix& m) {
  auto vars = m.variables();
  return vars.empty() ? 0 : static_cast<std::size_t>(vars.back()) + 1;
}

}  // namespace

PrimeFieldMatrix evaluate_mod(const PolyMatrix& m, std::span<const std::uint64_t> values, std::uint64_t p) {
  PrimeFieldMatrix out(p, m.rows(), m.cols());
  for (const auto& [rc, poly] : m.entries()) out.set(rc.first, rc.second, poly.evaluate_mod(values, p));
  return out;
}

StructuralRank structural_rank(const PolyMatrix& m, const StructuralRankOptions& opts) {
  if (opts.trials < 1) throw InputError("structural_rank: trials must be >= 1");
  StructuralRank best;
  const std::size_t nvars = variable_span(m);
  for (int trial = 0; trial < opts.trials; ++trial) {
    std::seed_seq seq{opts.seed, static_cast<std::uint64_t>(trial)};
    std::mt19937_64 rng(seq);
    auto values = random_field_values(rng, nvars, opts.prime);
    auto w = rank_with_witness(evaluate_mod(m, values, opts.prime));
    if (w.rank > best.rank || trial == 0) {
      best.rank = w.rank;
      best.witness_rows = std::move(w.rows);
      best.witness_cols = std::move(w.cols);
    }
    if (best.rank == std::min(m.rows(), m.cols())) break;
  }
  // A maximal minor has degree at most min(rows, cols) * max entry degree;
  // each trial misses it with probability at most degree / p.
  const double degree = static_cast<double>(std::min(m.rows(), m.cols())) * m.max_degree();
  const double per_trial = std::min(1.0, degree / static_cast<double>(opts.prime));
  best.failure_bound = best.rank == std::min(m.rows(), m.cols()) ? 0.0 : std::pow(per_trial, opts.trials);
  return best;
}

MmgReport mmg(const NetworkGraph& net, Terminals t, const StructuralRankOptions& opts) {
  MmgReport report;
  bool first = true;
  for (auto& cut : enumerate_cuts(net, t)) {
    CutRank cr;
    cr.pattern = cut_transfer_pattern(net, cut);
    cr.rank = structural_rank(cr.pattern.matrix, opts);
    cr.cut = std::move(cut);
    report.failure_bound += cr.rank.failure_bound;
    if (first || cr.rank.rank < report.mmg) report.mmg = cr.rank.rank;
    first = false;
    report.cuts.push_back(std::move(cr));
  }
  report.failure_bound = std::min(1.0, report.failure_bound);
  return report;
}

MmgReport mmg(const NetworkGraph& net, const StructuralRankOptions& opts) {
  return mmg(net, default_terminals(net), opts);
}

int multicast_mmg(const NetworkGraph& net, const StructuralRankOptions& opts) {
  const NodeIndex s = net.source();
  auto sinks = net.sinks();
  if (sinks.empty()) throw InputError("multicast_mmg: network has no sink");
  int best = -1;
  for (NodeIndex d : sinks) {
    int v = mmg(net, Terminals{s, d}, opts).mmg;
    if (best < 0 || v < best) best = v;
  }
  return best;
}

}  // namespace dmtlab
