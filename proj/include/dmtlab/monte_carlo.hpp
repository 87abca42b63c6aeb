#pragma once

// Monte Carlo outage estimation and the probabilistic checks behind the
// analytic results (noise whitening, small-ball and tail behaviour of
// polynomials in Rayleigh variables, eigenvalue bounds on the noise
// covariance).

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dmtlab/polynomial.hpp"
#include "dmtlab/protocols.hpp"

namespace dmtlab {

/// Worker count: DMTLAB_THREADS if set and positive, else the hardware count.
int worker_count();

/// Trials per independent random stream. Stream k is seeded by (seed, k)
/// alone, so results do not depend on the number of workers.
inline constexpr std::uint64_t kChunkTrials = 1 << 14;

std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk);

/// Fills `out` with i.i.d. CN(0, 1) samples.
void sample_fading(std::mt19937_64& rng, std::span<std::complex<double>> out);

struct OutageOptions {
  std::uint64_t seed = 42;
  /// Account for the colored relay noise; false treats the noise as white.
  bool whiten = true;
  /// 0 selects worker_count().
  int threads = 0;
};

struct OutageCount {
  double rho_db = 0.0;
  std::uint64_t events = 0;
  std::uint64_t trials = 0;
  double p() const { return trials ? static_cast<double>(events) / static_cast<double>(trials) : 0.0; }
  double std_error() const;
};

/// Mutual information per channel use, in bits, of one realization:
/// (log2 det(Sigma + rho H H^H) - log2 det Sigma) / total_slots.
double mutual_information(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& sigma, double rho,
                          int total_slots);

/// Outage counts at every SNR of the ladder. The same fading samples are used
/// at each SNR.
std::vector<OutageCount> outage_sweep(const InducedChannel& ic, double r,
                                      const std::vector<double>& rho_db, std::uint64_t trials,
                                      const OutageOptions& opts = {});

/// Fraction of fading draws with mutual information below r log2 rho.
double outage_probability(const InducedChannel& ic, double r, double rho, std::uint64_t trials,
                          bool whiten = true, std::uint64_t seed = 42);

/// Least-squares slope of -log P against log rho and its 95% half-width,
/// from the binomial standard errors of the points used.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci = 0.0;
  int points = 0;
};

inline constexpr std::uint64_t kMinFitEvents = 50;

SlopeFit fit_diversity_slope(const std::vector<OutageCount>& counts,
                             std::uint64_t min_events = kMinFitEvents);

struct OutageEstimate {
  double r = 0.0;
  bool whiten = true;
  std::uint64_t seed = 42;
  std::vector<OutageCount> points;
  /// True where the point entered the fit.
  std::vector<bool> used;
  SlopeFit fit;
  /// Fewer than two usable points: slope and ci are meaningless.
  bool fitted() const { return fit.points >= 2; }
};

OutageEstimate estimate_diversity(const InducedChannel& ic, double r, const std::vector<double>& rho_db,
                                  std::uint64_t trials, const OutageOptions& opts = {});

struct SmallBallReport {
  std::vector<double> delta;
  std::vector<double> probability;
  std::vector<std::uint64_t> hits;
  std::uint64_t trials = 0;
  /// Log-log slope of probability against delta.
  double slope = 0.0;
  /// The lower bound 1 / (2 deg) on the decay exponent.
  double exponent_bound = 0.0;
  bool rank_deficient = false;
  bool decays = false;
};

/// Empirical Pr{|f|^2 < delta} for f a determinant polynomial in Rayleigh
/// variables.
SmallBallReport small_ball_check(const Polynomial& f, const std::vector<double>& deltas,
                                 std::uint64_t trials, std::uint64_t seed = 42);

struct TailReport {
  std::vector<double> k;
  std::vector<double> probability;
  std::vector<std::uint64_t> hits;
  std::uint64_t trials = 0;
  std::uint32_t degree = 0;
  /// Fit of log Pr = a - b k^(1/degree) over points with enough hits.
  double rate = 0.0;
  double offset = 0.0;
  /// Log-log slope between consecutive usable points; steepening means the
  /// tail is lighter than any power law.
  std::vector<double> local_power;
  bool stretched_exponential = false;
};

/// Empirical Pr{|f|^2 > k}; f must have no constant term.
TailReport tail_bound_check(const Polynomial& f, const std::vector<double>& ks, std::uint64_t trials,
                            std::uint64_t seed = 42);

struct EigenBoundReport {
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  double min_lambda_min = 0.0;
  /// Largest lambda_max / (1 + sum ||G_i||_F^2) seen.
  double max_upper_ratio = 0.0;
  bool ok() const { return violations == 0; }
};

/// lambda_min(Sigma) >= 1 and lambda_max(Sigma) <= 1 + sum_i ||G_i||_F^2 at
/// random assignments, to 1e-9 relative tolerance.
EigenBoundReport eigen_bound_check(const InducedChannel& ic, std::uint64_t samples,
                                   std::uint64_t seed = 42);
/// The same check on one given covariance and Frobenius budget.
EigenBoundReport eigen_bound_check(const Eigen::MatrixXcd& sigma, double frobenius_sum);

}  // namespace dmtlab
