#include "dmtlab/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "dmtlab/error.hpp"

namespace dmtlab {

int worker_count() {
  if (const char* env = std::getenv("DMTLAB_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

void sample_fading(std::mt19937_64& rng, std::span<std::complex<double>> out) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  for (auto& v : out) {
    const double re = n(rng);
    const double im = n(rng);
    v = {re, im};
  }
}

double OutageCount::std_error() const {
  if (trials == 0) return 0.0;
  const double q = p();
  return std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
}

namespace {

double log2_det_spd(const Eigen::MatrixXcd& a) {
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  if (llt.info() != Eigen::Success) throw std::runtime_error("log det of a matrix that is not positive definite");
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) s += std::log2(llt.matrixL()(i, i).real());
  return 2.0 * s;
}

std::size_t variable_span(const InducedChannel& ic) {
  std::size_t n = 0;
  auto bump = [&](const PolyMatrix& m) {
    auto v = m.variables();
    if (!v.empty()) n = std::max(n, static_cast<std::size_t>(v.back()) + 1);
  };
  bump(ic.signal);
  for (const auto& g : ic.noise_transfers) bump(g);
  return n;
}

// Runs body(chunk, rng, count) for every chunk on worker threads and returns
// the per-chunk results in chunk order.
template <typename Result, typename Body>
std::vector<Result> for_each_chunk(std::uint64_t trials, std::uint64_t seed, int threads, Body body) {
  const std::uint64_t chunks = (trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<Result> results(static_cast<std::size_t>(chunks));
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      auto rng = chunk_engine(seed, c);
      const std::uint64_t count = std::min(kChunkTrials, trials - c * kChunkTrials);
      results[static_cast<std::size_t>(c)] = body(rng, count);
    }
  };
  const int n = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(threads > 0 ? threads : worker_count()),
                                                          std::max<std::uint64_t>(chunks, 1)));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace

double mutual_information(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& sigma, double rho, int total_slots) {
  Eigen::MatrixXcd a = sigma;
  a.noalias() += rho * (h * h.adjoint());
  return (log2_det_spd(a) - log2_det_spd(sigma)) / total_slots;
}

std::vector<OutageCount> outage_sweep(const InducedChannel& ic, double r, const std::vector<double>& rho_db,
                                      std::uint64_t trials, const OutageOptions& opts) {
  if (trials < 1) throw InputError("outage: trials must be >= 1");
  if (r < 0) throw InputError("outage: multiplexing gain must be nonnegative");
  if (ic.total_slots < 1 || ic.signal.rows() == 0) throw InputError("outage: empty channel");
  const std::size_t nvars = variable_span(ic);
  const CompiledPolyMatrix h_eval(ic.signal);
  std::vector<CompiledPolyMatrix> g_eval;
  if (opts.whiten)
    for (const auto& g : ic.noise_transfers) g_eval.emplace_back(g);
  const std::size_t npts = rho_db.size();
  std::vector<double> rho(npts), threshold(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    rho[i] = std::pow(10.0, rho_db[i] / 10.0);
    threshold[i] = r * std::log2(rho[i]) * ic.total_slots;
  }
  const Eigen::Index n = ic.signal.rows();

  auto chunks = for_each_chunk<std::vector<std::uint64_t>>(
      trials, opts.seed, opts.threads, [&](std::mt19937_64& rng, std::uint64_t count) {
        std::vector<std::uint64_t> events(npts, 0);
        std::vector<std::complex<double>> values(nvars);
        Eigen::MatrixXcd h, g, hh, sigma, a;
        for (std::uint64_t k = 0; k < count; ++k) {
          sample_fading(rng, values);
          h_eval.evaluate(values, h);
          hh.noalias() = h * h.adjoint();
          sigma.setIdentity(n, n);
          for (const auto& ge : g_eval) {
            ge.evaluate(values, g);
            sigma.noalias() += g * g.adjoint();
          }
          const double base = g_eval.empty() ? 0.0 : log2_det_spd(sigma);
          for (std::size_t i = 0; i < npts; ++i) {
            a = sigma;
            a.noalias() += rho[i] * hh;
            if (log2_det_spd(a) - base < threshold[i]) ++events[i];
          }
        }
        return events;
      });

  std::vector<OutageCount> out(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    out[i].rho_db = rho_db[i];
    out[i].trials = trials;
    for (const auto& c : chunks) out[i].events += c[i];
  }
  return out;
}

double outage_probability(const InducedChannel& ic, double r, double rho, std::uint64_t trials, bool whiten,
                          std::uint64_t seed) {
  if (!(rho > 0)) throw InputError("outage: SNR must be positive");
  OutageOptions o;
  o.seed = seed;
  o.whiten = whiten;
  return outage_sweep(ic, r, {10.0 * std::log10(rho)}, trials, o).front().p();
}

SlopeFit fit_diversity_slope(const std::vector<OutageCount>& counts, std::uint64_t min_events) {
  std::vector<double> x, y, var;
  for (const auto& c : counts) {
    if (c.events < min_events || c.trials == 0) continue;
    const double p = c.p();
    x.push_back(c.rho_db / 10.0 * std::log(10.0));
    y.push_back(-std::log(p));
    var.push_back((1.0 - p) / (static_cast<double>(c.trials) * p));
  }
  SlopeFit fit;
  fit.points = static_cast<int>(x.size());
  if (x.size() < 2) {
    fit.ci = std::numeric_limits<double>::infinity();
    return fit;
  }
  const double n = static_cast<double>(x.size());
  double xm = 0, ym = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i] / n;
    ym += y[i] / n;
  }
  double sxx = 0;
  for (double xi : x) sxx += (xi - xm) * (xi - xm);
  double slope = 0, v = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = (x[i] - xm) / sxx;
    slope += w * y[i];
    v += w * w * var[i];
  }
  fit.slope = slope;
  fit.intercept = ym - slope * xm;
  fit.ci = 1.96 * std::sqrt(v);
  return fit;
}

OutageEstimate estimate_diversity(const InducedChannel& ic, double r, const std::vector<double>& rho_db,
                                  std::uint64_t trials, const OutageOptions& opts) {
  if (rho_db.size() < 3) throw InputError("estimate_diversity: need at least 3 SNR points");
  OutageEstimate e;
  e.r = r;
  e.whiten = opts.whiten;
  e.seed = opts.seed;
  e.points = outage_sweep(ic, r, rho_db, trials, opts);
  for (const auto& p : e.points) e.used.push_back(p.events >= kMinFitEvents);
  e.fit = fit_diversity_slope(e.points);
  return e;
}

namespace {

// Per-chunk counts of |f|^2 against each threshold.
std::vector<std::uint64_t> count_polynomial(const Polynomial& f, const std::vector<double>& thresholds, bool below,
                                            std::uint64_t trials, std::uint64_t seed) {
  PolyMatrix m(1, 1);
  m.set(0, 0, f);
  const CompiledPolyMatrix eval(m);
  auto vars = f.variables();
  const std::size_t nvars = vars.empty() ? 0 : static_cast<std::size_t>(vars.back()) + 1;
  auto chunks = for_each_chunk<std::vector<std::uint64_t>>(
      trials, seed, 0, [&](std::mt19937_64& rng, std::uint64_t count) {
        std::vector<std::uint64_t> hits(thresholds.size(), 0);
        std::vector<std::complex<double>> values(nvars);
        Eigen::MatrixXcd out;
        for (std::uint64_t k = 0; k < count; ++k) {
          sample_fading(rng, values);
          eval.evaluate(values, out);
          const double a = std::norm(out(0, 0));
          for (std::size_t i = 0; i < thresholds.size(); ++i)
            if (below ? a < thresholds[i] : a > thresholds[i]) ++hits[i];
        }
        return hits;
      });
  std::vector<std::uint64_t> total(thresholds.size(), 0);
  for (const auto& c : chunks)
    for (std::size_t i = 0; i < c.size(); ++i) total[i] += c[i];
  return total;
}

// Ordinary least squares y = a + b x; returns {a, b}.
std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double xm = 0, ym = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i] / n;
    ym += y[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - xm) * (y[i] - ym);
    sxx += (x[i] - xm) * (x[i] - xm);
  }
  const double b = sxx > 0 ? sxy / sxx : 0.0;
  return {ym - b * xm, b};
}

}  // namespace

SmallBallReport small_ball_check(const Polynomial& f, const std::vector<double>& deltas, std::uint64_t trials,
                                 std::uint64_t seed) {
  if (trials < 1) throw InputError("small_ball_check: trials must be >= 1");
  SmallBallReport rep;
  rep.delta = deltas;
  rep.trials = trials;
  if (f.is_zero()) {
    rep.rank_deficient = true;
    rep.probability.assign(deltas.size(), 1.0);
    rep.hits.assign(deltas.size(), trials);
    return rep;
  }
  rep.exponent_bound = 1.0 / (2.0 * std::max<std::uint32_t>(1, f.total_degree()));
  rep.hits = count_polynomial(f, deltas, true, trials, seed);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    rep.probability.push_back(static_cast<double>(rep.hits[i]) / static_cast<double>(trials));
    if (rep.hits[i] > 0) {
      x.push_back(std::log(deltas[i]));
      y.push_back(std::log(rep.probability.back()));
    }
  }
  if (x.size() >= 2) {
    rep.slope = ols(x, y).second;
    rep.decays = rep.slope >= rep.exponent_bound;
  }
  return rep;
}

TailReport tail_bound_check(const Polynomial& f, const std::vector<double>& ks, std::uint64_t trials,
                            std::uint64_t seed) {
  if (f.constant_term() != 0) throw InputError("tail_bound_check: polynomial has a constant term");
  if (trials < 1) throw InputError("tail_bound_check: trials must be >= 1");
  TailReport rep;
  rep.k = ks;
  rep.trials = trials;
  rep.degree = f.total_degree();
  if (f.is_zero()) {
    rep.probability.assign(ks.size(), 0.0);
    rep.hits.assign(ks.size(), 0);
    rep.stretched_exponential = true;
    return rep;
  }
  rep.hits = count_polynomial(f, ks, false, trials, seed);
  std::vector<double> x, y, lk, var;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    rep.probability.push_back(static_cast<double>(rep.hits[i]) / static_cast<double>(trials));
    if (rep.hits[i] >= 10) {
      x.push_back(std::pow(ks[i], 1.0 / rep.degree));
      y.push_back(std::log(rep.probability.back()));
      lk.push_back(std::log(ks[i]));
      var.push_back(1.0 / static_cast<double>(rep.hits[i]));
    }
  }
  if (x.size() < 2) return rep;
  auto [a, b] = ols(x, y);
  rep.offset = a;
  rep.rate = -b;
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(y[i + 1] < y[i])) decreasing = false;
    rep.local_power.push_back((y[i + 1] - y[i]) / (lk[i + 1] - lk[i]));
  }
  // Tolerance: two standard errors of the difference of consecutive local slopes.
  bool steepening = true;
  for (std::size_t i = 0; i + 1 < rep.local_power.size(); ++i) {
    const double w0 = lk[i + 1] - lk[i], w1 = lk[i + 2] - lk[i + 1];
    const double se = std::sqrt((var[i] + var[i + 1]) / (w0 * w0) + (var[i + 1] + var[i + 2]) / (w1 * w1));
    if (rep.local_power[i + 1] > rep.local_power[i] + std::max(0.1, 2.0 * se)) steepening = false;
  }
  rep.stretched_exponential = rep.rate > 0 && decreasing && steepening;
  return rep;
}

namespace {

void check_sigma(const Eigen::MatrixXcd& sigma, double frob, EigenBoundReport& rep) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sigma, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double lo = ev.size() ? ev(0) : 1.0;
  const double hi = ev.size() ? ev(ev.size() - 1) : 1.0;
  const double cap = 1.0 + frob;
  if (rep.samples == 0 || lo < rep.min_lambda_min) rep.min_lambda_min = lo;
  rep.max_upper_ratio = std::max(rep.max_upper_ratio, hi / cap);
  ++rep.samples;
  if (lo < 1.0 - 1e-9 || hi > cap * (1.0 + 1e-9)) ++rep.violations;
}

}  // namespace

EigenBoundReport eigen_bound_check(const InducedChannel& ic, std::uint64_t samples, std::uint64_t seed) {
  EigenBoundReport rep;
  const std::size_t nvars = variable_span(ic);
  std::vector<std::complex<double>> values(nvars);
  auto rng = chunk_engine(seed, 0);
  for (std::uint64_t s = 0; s < samples; ++s) {
    sample_fading(rng, values);
    double frob = 0.0;
    for (const auto& g : ic.noise_transfers) frob += g.evaluate(values).squaredNorm();
    check_sigma(noise_covariance(ic, values), frob, rep);
  }
  return rep;
}

EigenBoundReport eigen_bound_check(const Eigen::MatrixXcd& sigma, double frobenius_sum) {
  EigenBoundReport rep;
  check_sigma(sigma, frobenius_sum, rep);
  return rep;
}

}  // namespace dmtlab
