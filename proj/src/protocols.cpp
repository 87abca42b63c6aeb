#include "dmtlab/protocols.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>

#include "dmtlab/error.hpp"

namespace dmtlab {

namespace {

// A symbolic signal: data-symbol components and relay-noise components.
struct Signal {
  std::map<int, Polynomial> data;   // column -> coefficient
  std::map<int, Polynomial> noise;  // global noise event -> coefficient

  void add_scaled(const Signal& s, const Polynomial& gain) {
    for (const auto& [k, p] : s.data) accumulate(data, k, gain * p);
    for (const auto& [k, p] : s.noise) accumulate(noise, k, gain * p);
  }

  static void accumulate(std::map<int, Polynomial>& m, int k, const Polynomial& p) {
    auto& slot = m[k];
    slot += p;
    if (slot.is_zero()) m.erase(k);
  }
};

struct NoiseEvent {
  NodeIndex relay;
  int local_index;
};

}  // namespace

InducedChannel build_induced_channel(const NetworkGraph& net, const Schedule& schedule, Terminals t,
                                     const ChannelBuildOptions& opts) {
  auto report = validate_schedule(net, schedule);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw InputError("schedule: slot " + std::to_string(v.slot + 1) + (v.node.empty() ? "" : ", node '" + v.node + "'") +
                     ": " + v.reason);
  }
  InducedChannel ic;
  ic.total_slots = schedule.total_slots();

  std::map<AntennaRef, Signal> buffer;
  std::vector<NoiseEvent> events;
  std::map<NodeIndex, int> events_per_relay;
  std::vector<Signal> observed;
  int columns = 0;

  for (int s = 0; s < schedule.total_slots(); ++s) {
    const Slot& slot = schedule.slots[static_cast<std::size_t>(s)];
    std::map<std::pair<NodeIndex, int>, int> route;
    for (const Route& r : slot.routes) route[{r.node, r.tx_antenna}] = r.rx_antenna;

    // What each transmitting antenna sends in this slot.
    std::map<AntennaRef, Signal> sent;
    for (EdgeId id : slot.live) {
      const Edge& e = net.edge(id);
      if (sent.count(e.from)) continue;
      if (e.to.node == t.source) throw InputError("schedule: slot " + std::to_string(s + 1) + " has a live edge into the source");
      if (e.from.node == t.sink) throw InputError("schedule: slot " + std::to_string(s + 1) + " has the sink transmitting");
      Signal sig;
      if (e.from.node == t.source) {
        if (slot.source_fresh) {
          sig.data[columns++] = Polynomial::constant(1);
          ic.cols.push_back({s, e.from.antenna});
        }
      } else {
        auto it = route.find({e.from.node, e.from.antenna});
        AntennaRef rx{e.from.node, it == route.end() ? e.from.antenna : it->second};
        auto b = buffer.find(rx);
        if (b == buffer.end())
          throw InputError("schedule: slot " + std::to_string(s + 1) + ", node '" + net.node(e.from.node).id +
                           "' transmits with an empty buffer");
        sig = b->second;
      }
      sent.emplace(e.from, std::move(sig));
    }

    std::map<AntennaRef, Signal> received;
    for (EdgeId id : slot.live) {
      const Edge& e = net.edge(id);
      received[e.to].add_scaled(sent.at(e.from), Polynomial::var(e.var));
    }
    for (auto& [ant, sig] : received) {
      if (ant.node == t.sink) {
        ic.rows.push_back({s, ant.antenna});
        observed.push_back(std::move(sig));
        continue;
      }
      const int k = static_cast<int>(events.size());
      events.push_back({ant.node, events_per_relay[ant.node]++});
      sig.noise[k] = Polynomial::constant(1);
      buffer[ant] = std::move(sig);
    }
  }

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < observed.size(); ++i)
    if (!opts.drop_silent_rows || !observed[i].data.empty()) keep.push_back(i);
  std::vector<Observation> rows;
  for (std::size_t i : keep) rows.push_back(ic.rows[i]);
  ic.rows = std::move(rows);

  const auto nrows = static_cast<Eigen::Index>(keep.size());
  ic.signal = PolyMatrix(nrows, columns);
  std::map<NodeIndex, PolyMatrix> g;
  for (Eigen::Index r = 0; r < nrows; ++r) {
    const Signal& sig = observed[keep[static_cast<std::size_t>(r)]];
    for (const auto& [c, p] : sig.data) ic.signal.set(r, c, p);
    for (const auto& [k, p] : sig.noise) {
      const NoiseEvent& ev = events[static_cast<std::size_t>(k)];
      auto it = g.find(ev.relay);
      if (it == g.end()) it = g.emplace(ev.relay, PolyMatrix(nrows, events_per_relay[ev.relay])).first;
      it->second.set(r, ev.local_index, p);
    }
  }
  for (auto& [relay, m] : g) {
    ic.noise_relays.push_back(relay);
    ic.noise_transfers.push_back(std::move(m));
  }
  return ic;
}

InducedChannel build_induced_channel(const NetworkGraph& net, const Schedule& schedule,
                                     const ChannelBuildOptions& opts) {
  return build_induced_channel(net, schedule, default_terminals(net), opts);
}

Eigen::MatrixXcd noise_covariance(const InducedChannel& ic, std::span<const std::complex<double>> assignment) {
  const Eigen::Index n = ic.signal.rows();
  Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Identity(n, n);
  for (const auto& g : ic.noise_transfers) {
    Eigen::MatrixXcd gv = g.evaluate(assignment);
    sigma.noalias() += gv * gv.adjoint();
  }
  return sigma;
}

BltParts blt_parts(const PolyMatrix& h, Eigen::Index block_rows, Eigen::Index block_cols) {
  if (block_rows < 1 || block_cols < 1 || h.rows() % block_rows || h.cols() % block_cols)
    throw InputError("blt_parts: dimensions are not multiples of the block size");
  if (h.rows() / block_rows != h.cols() / block_cols)
    throw InputError("blt_parts: block grid is not square");
  BltParts parts;
  parts.diagonal = PolyMatrix(h.rows(), h.cols());
  parts.last_subdiagonal = PolyMatrix(h.rows(), h.cols());
  for (const auto& [rc, p] : h.entries()) {
    const auto bi = rc.first / block_rows;
    const auto bj = rc.second / block_cols;
    if (bj > bi) throw InputError("blt_parts: matrix is not block-lower-triangular");
    parts.ell = std::max(parts.ell, static_cast<int>(bi - bj));
  }
  for (const auto& [rc, p] : h.entries()) {
    const auto diff = rc.first / block_rows - rc.second / block_cols;
    if (diff == 0) parts.diagonal.set(rc.first, rc.second, p);
    if (diff == parts.ell && parts.ell > 0) parts.last_subdiagonal.set(rc.first, rc.second, p);
  }
  return parts;
}

namespace {

using R = Rational;

DmtCurve<R> unit_ramp() { return DmtCurve<R>::ramp(R(1), R(1)); }

EdgeSpec edge(NodeIndex from, int fa, NodeIndex to, int ta, std::string label) {
  return EdgeSpec{{from, fa}, {to, ta}, std::move(label)};
}

}  // namespace

ProtocolRun naf_single() {
  ProtocolRun run;
  std::vector<SuperNode> nodes{{"s", 1, Role::Source, Duplex::Full},
                               {"r", 1, Role::Relay, Duplex::Half},
                               {"t", 1, Role::Sink, Duplex::Full}};
  run.network = NetworkGraph(nodes, {edge(0, 0, 2, 0, "g_d"), edge(0, 0, 1, 0, "g_1"), edge(1, 0, 2, 0, "h_1")});
  run.schedule.slots = {Slot{{0, 1}, {}, true}, Slot{{0, 2}, {}, true}};
  run.channel = build_induced_channel(run.network, run.schedule);
  auto matrix_bound = blt_lower_bound(DmtCurve<R>::ramp(R(1), R(2)), unit_ramp(), true);
  run.bound = scale_rate(matrix_bound, 2, 1);
  return run;
}

DmtCurve<Rational> naf_n_relay_bound(int relays) {
  if (relays < 1) throw InputError("naf_n_relay_bound: need at least one relay");
  return pointwise_sum(unit_ramp(), DmtCurve<R>::ramp(R(relays), R(1, 2)));
}

DmtCurve<Rational> saf_bound(int relays, int slots) {
  if (relays < 1 || slots < 2) throw InputError("saf_bound: need N >= 1 relays and M >= 2 slots");
  // d_{H0}(r) = (1 - r/M)^+, d_{Hl}(r) = N (1 - r/(M-1))^+, then r -> M r.
  auto diag = DmtCurve<R>::ramp(R(1), R(slots));
  auto sub = DmtCurve<R>::ramp(R(relays), R(slots - 1));
  return scale_rate(blt_lower_bound(diag, sub, true), slots, 1);
}

ProtocolRun saf_matrix(int relays, int cycles) {
  if (relays < 1 || cycles < 1) throw InputError("saf_matrix: need N >= 1 relays and k >= 1 cycles");
  const int slots = cycles * relays + 1;
  ProtocolRun run;
  // Relays hear only the source; with one relay and several cycles it must
  // listen and forward in the same slot, so it is full-duplex then.
  const Duplex relay_duplex = relays == 1 && cycles > 1 ? Duplex::Full : Duplex::Half;
  std::vector<SuperNode> nodes{{"s", 1, Role::Source, Duplex::Full}};
  for (int j = 1; j <= relays; ++j) nodes.push_back({"r" + std::to_string(j), 1, Role::Relay, relay_duplex});
  nodes.push_back({"t", 1, Role::Sink, Duplex::Full});
  const NodeIndex sink = relays + 1;
  std::vector<EdgeSpec> specs{edge(0, 0, sink, 0, "g_d")};
  for (int j = 1; j <= relays; ++j) {
    specs.push_back(edge(0, 0, j, 0, "f_" + std::to_string(j)));
    specs.push_back(edge(j, 0, sink, 0, "h_" + std::to_string(j)));
  }
  run.network = NetworkGraph(nodes, specs);
  auto to_relay = [](int j) { return static_cast<EdgeId>(2 * j - 1); };
  auto from_relay = [](int j) { return static_cast<EdgeId>(2 * j); };
  for (int s = 0; s < slots; ++s) {
    Slot slot;
    slot.live.push_back(0);
    if (s + 1 < slots) slot.live.push_back(to_relay(s % relays + 1));
    if (s > 0) slot.live.push_back(from_relay((s - 1) % relays + 1));
    std::sort(slot.live.begin(), slot.live.end());
    run.schedule.slots.push_back(slot);
  }
  run.channel = build_induced_channel(run.network, run.schedule);
  run.bound = saf_bound(relays, slots);
  return run;
}

ProtocolRun mimo_naf_channel(int ns, int nr, int nd) {
  if (ns < 1 || nr < 1 || nd < 1) throw InputError("mimo_naf: antenna counts must be >= 1");
  ProtocolRun run;
  std::vector<SuperNode> nodes{{"s", ns, Role::Source, Duplex::Full},
                               {"r", nr, Role::Relay, Duplex::Half},
                               {"t", nd, Role::Sink, Duplex::Full}};
  std::vector<EdgeSpec> specs;
  std::vector<EdgeId> direct, up, down;
  auto add = [&](NodeIndex u, int a, NodeIndex v, int b, const std::string& name, std::vector<EdgeId>& group) {
    group.push_back(static_cast<EdgeId>(specs.size()));
    specs.push_back(edge(u, a, v, b, name + "_" + std::to_string(b + 1) + std::to_string(a + 1)));
  };
  for (int b = 0; b < nd; ++b)
    for (int a = 0; a < ns; ++a) add(0, a, 2, b, "d", direct);
  for (int b = 0; b < nr; ++b)
    for (int a = 0; a < ns; ++a) add(0, a, 1, b, "f", up);
  for (int b = 0; b < nd; ++b)
    for (int a = 0; a < nr; ++a) add(1, a, 2, b, "g", down);
  run.network = NetworkGraph(nodes, specs);
  Slot first{direct, {}, true};
  first.live.insert(first.live.end(), up.begin(), up.end());
  Slot second{direct, {}, true};
  second.live.insert(second.live.end(), down.begin(), down.end());
  std::sort(first.live.begin(), first.live.end());
  std::sort(second.live.begin(), second.live.end());
  run.schedule.slots = {first, second};
  run.channel = build_induced_channel(run.network, run.schedule);
  run.bound = mimo_naf(ns, nr, nd, DmtCurve<R>());
  return run;
}

GenNafOptimum gen_naf_optimize(const DmtCurve<double>& d_direct, const std::vector<DmtCurve<double>>& relay_curves,
                               const GenNafOptions& opts) {
  if (opts.resolution < 1 || opts.refinement_rounds < 0 || !(opts.r_step > 0))
    throw InputError("gen_naf_optimize: invalid search options");
  const std::size_t n = relay_curves.size();
  GenNafOptimum out;
  double r_end = d_direct.r_max();
  for (const auto& c : relay_curves) r_end = std::max(r_end, c.r_max() / 2.0);

  auto value = [&](const std::vector<double>& f, double r) {
    return gen_naf_bound(d_direct, relay_curves, f)(r);
  };

  // Compositions of `resolution` into n parts.
  std::vector<std::vector<double>> grid;
  if (n > 0) {
    std::vector<int> parts(n, 0);
    auto rec = [&](auto&& self, std::size_t i, int left) -> void {
      if (i + 1 == n) {
        parts[i] = left;
        std::vector<double> f(n);
        for (std::size_t k = 0; k < n; ++k) f[k] = static_cast<double>(parts[k]) / opts.resolution;
        grid.push_back(std::move(f));
        return;
      }
      for (int v = left; v >= 0; --v) {
        parts[i] = v;
        self(self, i + 1, left - v);
      }
    };
    rec(rec, 0, opts.resolution);
  }

  std::vector<double> rs;
  for (int k = 0;; ++k) {
    double r = k * opts.r_step;
    if (r >= r_end - 1e-12) break;
    rs.push_back(r);
  }
  rs.push_back(r_end);

  std::vector<Breakpoint<double>> pts;
  for (double r : rs) {
    std::vector<double> best_f;
    double best = -1.0;
    for (const auto& f : grid) {
      double v = value(f, r);
      if (v > best + 1e-12) {
        best = v;
        best_f = f;
      }
    }
    if (n == 0) best = d_direct(r);
    // Pairwise transfers of mass at halving step sizes around the incumbent.
    double step = 1.0 / opts.resolution;
    for (int round = 0; round < opts.refinement_rounds && n > 1; ++round) {
      step /= 2.0;
      bool improved = true;
      while (improved) {
        improved = false;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            if (i == j || best_f[j] < step - 1e-15) continue;
            auto f = best_f;
            f[i] += step;
            f[j] = std::max(0.0, f[j] - step);
            double v = value(f, r);
            if (v > best + 1e-12) {
              best = v;
              best_f = std::move(f);
              improved = true;
            }
          }
      }
    }
    if (!pts.empty()) best = std::min(best, pts.back().d);
    if (r == rs.back()) best = 0.0;
    out.r.push_back(r);
    out.d.push_back(best);
    out.fractions.push_back(best_f);
    pts.push_back({r, best});
  }
  out.curve = DmtCurve<double>(std::move(pts));
  return out;
}

ProtocolRun edge_disjoint_protocol(const NetworkGraph& net, Terminals t) {
  ProtocolRun run;
  run.network = net;
  run.paths = edge_disjoint_paths(net, t);
  if (run.paths.empty()) throw InfeasibleError("edge-disjoint protocol: sink is unreachable (disconnected)");
  int total = 0;
  for (const auto& p : run.paths) {
    for (std::size_t j = 0; j < p.edges.size(); ++j) {
      Slot slot;
      slot.live = {p.edges[j]};
      if (j > 0) {
        const Edge& in = net.edge(p.edges[j - 1]);
        const Edge& out = net.edge(p.edges[j]);
        slot.routes.push_back({out.from.node, out.from.antenna, in.to.antenna});
      }
      run.schedule.slots.push_back(std::move(slot));
      ++total;
    }
  }
  run.channel = build_induced_channel(net, run.schedule, t);
  const int m = static_cast<int>(run.paths.size());
  run.bound = scale_rate(parallel_identical(unit_ramp(), m), R(total));
  return run;
}

ProtocolRun edge_disjoint_protocol(const NetworkGraph& net) {
  return edge_disjoint_protocol(net, default_terminals(net));
}

ProtocolRun fd_linear_protocol(const NetworkGraph& net, int slots_per_path, Terminals t) {
  if (!net.single_antenna()) throw InputError("fd-linear: requires single-antenna nodes");
  if (!net.all_full_duplex()) throw InputError("fd-linear: requires full-duplex nodes");
  ProtocolRun run;
  run.network = net;
  run.paths = edge_disjoint_paths(net, t);
  if (run.paths.empty()) throw InfeasibleError("fd-linear: sink is unreachable (disconnected)");
  const bool acyclic = network_is_acyclic(net);
  std::string shortcut_on;
  for (std::size_t i = 0; i < run.paths.size() && shortcut_on.empty(); ++i)
    if (path_has_shortcut(net, run.paths[i])) {
      for (NodeIndex v : run.paths[i].nodes(net)) shortcut_on += (shortcut_on.empty() ? "" : "-") + net.node(v).id;
    }
  if (!acyclic && !shortcut_on.empty())
    throw InfeasibleError("fd-linear: network has a directed cycle and path " + shortcut_on + " has a shortcut");
  run.diagnosis = acyclic ? "no directed cycles" : "edge-disjoint paths without shortcuts";

  const int m = static_cast<int>(run.paths.size());
  int d = 0;
  for (const auto& p : run.paths) d = std::max(d, static_cast<int>(p.length()));
  run.limit = DmtCurve<R>::ramp(R(m), R(1));
  if (slots_per_path <= 0) {
    run.bound = *run.limit;
    return run;
  }
  const int tt = slots_per_path;
  if (tt <= d) throw InputError("fd-linear: T must exceed the longest path length D = " + std::to_string(d));

  for (const auto& p : run.paths) {
    auto on_path = p.nodes(net);
    std::set<NodeIndex> members(on_path.begin(), on_path.end());
    std::vector<EdgeId> window;
    for (const auto& e : net.edges())
      if (members.count(e.from.node) && members.count(e.to.node) && e.from.node != t.sink && e.to.node != t.source)
        window.push_back(e.id);
    // Hop distance from the source inside the window; a relay transmits
    // only once it has heard something in this window.
    std::map<NodeIndex, int> dist{{t.source, 0}};
    std::deque<NodeIndex> queue{t.source};
    while (!queue.empty()) {
      NodeIndex v = queue.front();
      queue.pop_front();
      for (EdgeId id : window) {
        const Edge& e = net.edge(id);
        if (e.from.node == v && !dist.count(e.to.node)) {
          dist[e.to.node] = dist[v] + 1;
          queue.push_back(e.to.node);
        }
      }
    }
    for (int k = 0; k < tt; ++k) {
      Slot slot;
      slot.source_fresh = k < tt - d;
      for (EdgeId id : window) {
        auto it = dist.find(net.edge(id).from.node);
        if (it != dist.end() && it->second <= k) slot.live.push_back(id);
      }
      run.schedule.slots.push_back(std::move(slot));
    }
  }
  run.channel = build_induced_channel(net, run.schedule, t);
  std::vector<DmtCurve<R>> curves(static_cast<std::size_t>(m), unit_ramp());
  std::vector<R> reps(static_cast<std::size_t>(m), R(tt - d));
  run.bound = scale_rate(parallel_repeated(curves, reps), R(static_cast<std::int64_t>(m) * tt));
  return run;
}

ProtocolRun fd_linear_protocol(const NetworkGraph& net, int slots_per_path) {
  return fd_linear_protocol(net, slots_per_path, default_terminals(net));
}

InducedChannel scalar_channel() { return parallel_channel(1); }

InducedChannel parallel_channel(int branches) {
  if (branches < 1) throw InputError("parallel_channel: need at least one branch");
  InducedChannel ic;
  ic.signal = PolyMatrix(branches, branches);
  for (int i = 0; i < branches; ++i) {
    ic.signal.set(i, i, Polynomial::var(static_cast<VarId>(i)));
    ic.rows.push_back({0, i});
    ic.cols.push_back({0, i});
  }
  ic.total_slots = 1;
  return ic;
}

}  // namespace dmtlab
