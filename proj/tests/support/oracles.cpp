#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

using namespace dmtlab;

NetworkGraph random_network(std::mt19937_64& rng, const RandomNetSpec& spec) {
  std::uniform_int_distribution<int> nodes_dist(spec.min_nodes, spec.max_nodes);
  std::uniform_int_distribution<int> ant_dist(1, spec.max_antennas);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = nodes_dist(rng);
  std::vector<SuperNode> nodes;
  for (int i = 0; i < n; ++i) {
    SuperNode s;
    s.id = i == 0 ? "s" : i == n - 1 ? "t" : "v" + std::to_string(i);
    s.antennas = ant_dist(rng);
    s.role = i == 0 ? Role::Source : i == n - 1 ? Role::Sink : Role::Relay;
    nodes.push_back(s);
  }
  std::vector<EdgeSpec> edges;
  auto link = [&](int a, int b) {
    bool any = false;
    for (int x = 0; x < nodes[a].antennas; ++x)
      for (int y = 0; y < nodes[b].antennas; ++y)
        if (u(rng) < spec.antenna_edge_probability) {
          edges.push_back({{a, x}, {b, y}, ""});
          any = true;
        }
    if (!any) edges.push_back({{a, 0}, {b, 0}, ""});
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (u(rng) < spec.link_probability) link(a, b);
      // Back edges never touch the terminals.
      if (a > 0 && b < n - 1 && u(rng) < spec.back_edge_probability) link(b, a);
    }
  return NetworkGraph(nodes, edges);
}

int brute_force_min_cut(const NetworkGraph& net) {
  const int n = net.node_count();
  const int s = net.source();
  const int t = net.sink();
  std::vector<int> relays;
  for (int v = 0; v < n; ++v)
    if (v != s && v != t) relays.push_back(v);
  int best = -1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << relays.size()); ++mask) {
    std::vector<bool> side(static_cast<std::size_t>(n), false);
    side[static_cast<std::size_t>(s)] = true;
    for (std::size_t i = 0; i < relays.size(); ++i)
      if (mask >> i & 1) side[static_cast<std::size_t>(relays[i])] = true;
    int count = 0;
    for (const auto& e : net.edges())
      if (side[static_cast<std::size_t>(e.from.node)] && !side[static_cast<std::size_t>(e.to.node)]) ++count;
    if (best < 0 || count < best) best = count;
  }
  return best;
}

std::vector<std::vector<int>> simple_paths(const NetworkGraph& net) {
  std::vector<std::vector<int>> out;
  std::vector<int> stack;
  std::vector<bool> on_path(static_cast<std::size_t>(net.node_count()), false);
  const int t = net.sink();
  std::function<void(int)> walk = [&](int v) {
    if (v == t) {
      out.push_back(stack);
      return;
    }
    on_path[static_cast<std::size_t>(v)] = true;
    for (const auto& e : net.edges()) {
      if (e.from.node != v || on_path[static_cast<std::size_t>(e.to.node)]) continue;
      stack.push_back(e.id);
      walk(e.to.node);
      stack.pop_back();
    }
    on_path[static_cast<std::size_t>(v)] = false;
  };
  walk(net.source());
  return out;
}

int max_disjoint_paths(const NetworkGraph& net) {
  const auto paths = simple_paths(net);
  std::vector<bool> used(static_cast<std::size_t>(net.edge_count()), false);
  int best = 0;
  std::function<void(std::size_t, int)> pick = [&](std::size_t i, int count) {
    best = std::max(best, count);
    for (std::size_t k = i; k < paths.size(); ++k) {
      bool free = std::none_of(paths[k].begin(), paths[k].end(), [&](int e) { return used[static_cast<std::size_t>(e)]; });
      if (!free) continue;
      for (int e : paths[k]) used[static_cast<std::size_t>(e)] = true;
      pick(k + 1, count + 1);
      for (int e : paths[k]) used[static_cast<std::size_t>(e)] = false;
    }
  };
  pick(0, 0);
  return best;
}

std::vector<double> grid_inf_convolution_table(const std::vector<DmtCurve<double>>& curves, double step) {
  // Each table covers [0, r_max]; beyond it the curve is zero, so extra rate
  // never needs to go to a subchannel past its own r_max.
  auto table = [&](const DmtCurve<double>& c) {
    const auto n = static_cast<std::size_t>(std::ceil(c.r_max() / step - 1e-9));
    std::vector<double> t(n + 1);
    for (std::size_t k = 0; k <= n; ++k) t[k] = c(static_cast<double>(k) * step);
    return t;
  };
  std::vector<double> acc = table(curves.at(0));
  for (std::size_t i = 1; i < curves.size(); ++i) {
    const auto b = table(curves[i]);
    std::vector<double> next(acc.size() + b.size() - 1, INFINITY);
    for (std::size_t x = 0; x < acc.size(); ++x)
      for (std::size_t y = 0; y < b.size(); ++y) next[x + y] = std::min(next[x + y], acc[x] + b[y]);
    acc = std::move(next);
  }
  return acc;
}

double grid_inf_convolution(const std::vector<DmtCurve<double>>& curves, double r, double step) {
  const auto table = grid_inf_convolution_table(curves, step);
  const auto n = static_cast<std::size_t>(std::llround(r / step));
  return n < table.size() ? table[n] : 0.0;
}

DmtCurve<double> random_convex_curve(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> seg_dist(1, 4);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  const int segs = seg_dist(rng);
  std::vector<double> slopes, widths;
  for (int i = 0; i < segs; ++i) {
    slopes.push_back(u(rng) * 4.0);
    widths.push_back(u(rng));
  }
  std::sort(slopes.begin(), slopes.end(), std::greater<>());
  double d = 0;
  for (int i = 0; i < segs; ++i) d += slopes[static_cast<std::size_t>(i)] * widths[static_cast<std::size_t>(i)];
  std::vector<Breakpoint<double>> pts{{0.0, d}};
  double r = 0;
  for (int i = 0; i < segs; ++i) {
    r += widths[static_cast<std::size_t>(i)];
    d -= slopes[static_cast<std::size_t>(i)] * widths[static_cast<std::size_t>(i)];
    pts.push_back({r, std::max(d, 0.0)});
  }
  pts.back().d = 0.0;
  return DmtCurve<double>(pts);
}

int max_matching(const std::vector<std::vector<bool>>& support) {
  const std::size_t rows = support.size();
  const std::size_t cols = rows ? support[0].size() : 0;
  std::vector<int> match_col(cols, -1);
  std::vector<bool> seen;
  std::function<bool(std::size_t)> augment = [&](std::size_t r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (!support[r][c] || seen[c]) continue;
      seen[c] = true;
      if (match_col[c] < 0 || augment(static_cast<std::size_t>(match_col[c]))) {
        match_col[c] = static_cast<int>(r);
        return true;
      }
    }
    return false;
  };
  int size = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    seen.assign(cols, false);
    if (augment(r)) ++size;
  }
  return size;
}

double scalar_outage(double r, double rho) { return -std::expm1(-(std::pow(rho, r) - 1.0) / rho); }

double two_branch_outage(double r, double rho) {
  const double target = std::pow(rho, r);
  const double a = (target - 1.0) / rho;
  if (a <= 0) return 0.0;
  auto f = [&](double x) {
    double g = (target / (1.0 + rho * x) - 1.0) / rho;
    return std::exp(-x) * -std::expm1(-std::max(g, 0.0));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, a, 10, 1e-9);
}

double relay_pair_outage(double e, double rho) {
  // X = |a|^2 B / (1 + B) with B ~ Exp(1): averaging e^{-x(1+B)/B} over B
  // gives the CDF 1 - 2 sqrt(x) e^{-x} K1(2 sqrt(x)).
  auto cdf = [](double x) {
    if (x <= 0) return 0.0;
    double s = std::sqrt(x);
    return 1.0 - 2.0 * s * std::exp(-x) * std::cyl_bessel_k(1.0, 2.0 * s);
  };
  const double target = std::pow(rho, e);
  const double a = (target - 1.0) / rho;
  if (a <= 0) return 0.0;
  // x = u^2 removes the logarithmic singularity of the density at 0.
  auto f = [&](double u) {
    if (u <= 0) return 0.0;
    double x = u * u;
    double density = 2.0 * std::exp(-x) * (u * std::cyl_bessel_k(1.0, 2.0 * u) + std::cyl_bessel_k(0.0, 2.0 * u));
    return 2.0 * u * density * cdf((target / (1.0 + rho * x) - 1.0) / rho);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::sqrt(a), 10, 1e-9);
}

double ols_slope(const std::vector<double>& rho_db, const std::vector<double>& p) {
  const double n = static_cast<double>(p.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double x = rho_db[i] / 10.0 * std::log(10.0);
    double y = -std::log(p[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TimeDomainResult simulate_schedule(const NetworkGraph& net, const Schedule& schedule,
                                   const std::vector<std::complex<double>>& fading) {
  using Vec = Eigen::VectorXcd;
  const int s = net.source();
  const int t = net.sink();

  // First pass: emissions and relay receptions, to size the response vectors.
  TimeDomainResult out;
  std::vector<std::pair<int, std::pair<int, int>>> receptions;
  for (int k = 0; k < schedule.total_slots(); ++k) {
    const auto& slot = schedule.slots[static_cast<std::size_t>(k)];
    std::vector<int> tx, rx;
    for (int id : slot.live) {
      const auto& e = net.edge(id);
      if (e.from.node == s) tx.push_back(e.from.antenna);
      if (e.to.node != t) rx.push_back(e.to.node * 64 + e.to.antenna);
    }
    std::sort(tx.begin(), tx.end());
    tx.erase(std::unique(tx.begin(), tx.end()), tx.end());
    std::sort(rx.begin(), rx.end());
    rx.erase(std::unique(rx.begin(), rx.end()), rx.end());
    if (slot.source_fresh)
      for (int a : tx) out.emissions.push_back({k, a});
    for (int code : rx) receptions.push_back({k, {code / 64, code % 64}});
  }
  const auto nx = static_cast<Eigen::Index>(out.emissions.size());
  const auto nz = static_cast<Eigen::Index>(receptions.size());

  // Each signal is a pair of response vectors (data, noise).
  struct Sig {
    Vec x, z;
  };
  std::map<std::pair<int, int>, Sig> buffer;
  std::vector<Sig> observed;
  for (int k = 0; k < schedule.total_slots(); ++k) {
    const auto& slot = schedule.slots[static_cast<std::size_t>(k)];
    auto sent_by = [&](const Edge& e) {
      Sig sig{Vec::Zero(nx), Vec::Zero(nz)};
      if (e.from.node == s) {
        if (slot.source_fresh) {
          auto it = std::find(out.emissions.begin(), out.emissions.end(), std::make_pair(k, e.from.antenna));
          sig.x(it - out.emissions.begin()) = 1.0;
        }
        return sig;
      }
      int rx_ant = e.from.antenna;
      for (const auto& r : slot.routes)
        if (r.node == e.from.node && r.tx_antenna == e.from.antenna) rx_ant = r.rx_antenna;
      return buffer.at({e.from.node, rx_ant});
    };
    std::map<std::pair<int, int>, Sig> incoming;
    for (int id : slot.live) {
      const auto& e = net.edge(id);
      Sig sig = sent_by(e);
      auto key = std::make_pair(e.to.node, e.to.antenna);
      auto it = incoming.find(key);
      if (it == incoming.end()) it = incoming.emplace(key, Sig{Vec::Zero(nx), Vec::Zero(nz)}).first;
      it->second.x += fading[static_cast<std::size_t>(e.var)] * sig.x;
      it->second.z += fading[static_cast<std::size_t>(e.var)] * sig.z;
    }
    for (auto& [key, sig] : incoming) {
      if (key.first == t) {
        out.observations.push_back({k, key.second});
        observed.push_back(sig);
        continue;
      }
      auto it = std::find(receptions.begin(), receptions.end(), std::make_pair(k, key));
      sig.z(it - receptions.begin()) += 1.0;
      buffer[key] = sig;
    }
  }
  const auto ny = static_cast<Eigen::Index>(observed.size());
  out.signal.resize(ny, nx);
  out.noise.resize(ny, nz);
  for (Eigen::Index i = 0; i < ny; ++i) {
    out.signal.row(i) = observed[static_cast<std::size_t>(i)].x.transpose();
    out.noise.row(i) = observed[static_cast<std::size_t>(i)].z.transpose();
  }
  return out;
}

std::vector<std::complex<double>> random_fading(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  std::vector<std::complex<double>> h(n);
  for (auto& v : h) v = {g(rng), g(rng)};
  return h;
}

}  // namespace oracle
