#include "dmtlab/network.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "dmtlab/error.hpp"

namespace dmtlab {

NetworkGraph::NetworkGraph(std::vector<SuperNode> nodes, const std::vector<EdgeSpec>& edges)
    : nodes_(std::move(nodes)), out_(nodes_.size()), in_(nodes_.size()) {
  std::set<std::string> ids;
  for (const auto& n : nodes_) {
    if (n.id.empty()) throw InputError("network: node with empty id");
    if (!ids.insert(n.id).second) throw InputError("network: duplicate node id '" + n.id + "'");
    if (n.antennas < 1) throw InputError("network: node '" + n.id + "' needs at least one antenna");
  }
  auto check_ref = [&](const AntennaRef& a) {
    if (a.node < 0 || a.node >= node_count()) throw InputError("network: edge refers to unknown node");
    if (a.antenna < 0 || a.antenna >= nodes_[static_cast<std::size_t>(a.node)].antennas)
      throw InputError("network: antenna index out of range at node '" +
                       nodes_[static_cast<std::size_t>(a.node)].id + "'");
  };
  for (const auto& spec : edges) {
    check_ref(spec.from);
    check_ref(spec.to);
    if (spec.from.node == spec.to.node)
      throw InputError("network: self-loop at node '" + nodes_[static_cast<std::size_t>(spec.from.node)].id + "'");
    Edge e;
    e.id = static_cast<EdgeId>(edges_.size());
    e.from = spec.from;
    e.to = spec.to;
    e.var = static_cast<VarId>(e.id);
    e.label = spec.label.empty() ? "h" + std::to_string(e.id) : spec.label;
    out_[static_cast<std::size_t>(e.from.node)].push_back(e.id);
    in_[static_cast<std::size_t>(e.to.node)].push_back(e.id);
    edges_.push_back(std::move(e));
  }
}

std::optional<NodeIndex> NetworkGraph::find_node(const std::string& id) const {
  for (NodeIndex i = 0; i < node_count(); ++i)
    if (nodes_[static_cast<std::size_t>(i)].id == id) return i;
  return std::nullopt;
}

NodeIndex NetworkGraph::node_index(const std::string& id) const {
  auto i = find_node(id);
  if (!i) throw InputError("network: unknown node '" + id + "'");
  return *i;
}

std::vector<NodeIndex> NetworkGraph::sources() const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < node_count(); ++i)
    if (node(i).role == Role::Source) out.push_back(i);
  return out;
}

std::vector<NodeIndex> NetworkGraph::sinks() const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < node_count(); ++i)
    if (node(i).role == Role::Sink) out.push_back(i);
  return out;
}

NodeIndex NetworkGraph::source() const {
  auto s = sources();
  if (s.size() != 1) throw InputError("network: expected exactly one source, found " + std::to_string(s.size()));
  return s.front();
}

NodeIndex NetworkGraph::sink() const {
  auto s = sinks();
  if (s.size() != 1) throw InputError("network: expected exactly one sink, found " + std::to_string(s.size()));
  return s.front();
}

bool NetworkGraph::all_full_duplex() const {
  return std::all_of(nodes_.begin(), nodes_.end(), [](const SuperNode& n) { return n.duplex == Duplex::Full; });
}

bool NetworkGraph::single_antenna() const {
  return std::all_of(nodes_.begin(), nodes_.end(), [](const SuperNode& n) { return n.antennas == 1; });
}

int NetworkGraph::max_antennas() const {
  int m = 0;
  for (const auto& n : nodes_) m = std::max(m, n.antennas);
  return m;
}

std::vector<std::string> NetworkGraph::variable_names() const {
  std::vector<std::string> names;
  names.reserve(edges_.size());
  for (const auto& e : edges_) names.push_back(e.label);
  return names;
}

Terminals default_terminals(const NetworkGraph& net) { return {net.source(), net.sink()}; }

std::vector<NodeIndex> Cut::source_nodes() const {
  std::vector<NodeIndex> out;
  for (std::size_t i = 0; i < source_side.size(); ++i)
    if (source_side[i]) out.push_back(static_cast<NodeIndex>(i));
  return out;
}

namespace {

void check_terminals(const NetworkGraph& net, Terminals t) {
  if (t.source < 0 || t.source >= net.node_count() || t.sink < 0 || t.sink >= net.node_count())
    throw InputError("terminals out of range");
  if (t.source == t.sink) throw InputError("source and sink coincide");
}

}  // namespace

Cut make_cut(const NetworkGraph& net, std::vector<bool> source_side, Terminals t) {
  check_terminals(net, t);
  if (source_side.size() != static_cast<std::size_t>(net.node_count()))
    throw InputError("cut: membership size does not match node count");
  if (!source_side[static_cast<std::size_t>(t.source)] || source_side[static_cast<std::size_t>(t.sink)])
    throw InputError("cut: must contain the source and exclude the sink");
  Cut c;
  c.source_side = std::move(source_side);
  for (const auto& e : net.edges())
    if (c.source_side[static_cast<std::size_t>(e.from.node)] && !c.source_side[static_cast<std::size_t>(e.to.node)])
      c.crossing_edges.push_back(e.id);
  return c;
}

std::vector<Cut> enumerate_cuts(const NetworkGraph& net, Terminals t, int node_limit) {
  check_terminals(net, t);
  if (net.node_count() > node_limit)
    throw InfeasibleError("cut enumeration refused: " + std::to_string(net.node_count()) +
                          " nodes exceed the limit of " + std::to_string(node_limit) +
                          " (exponential enumeration)");
  std::vector<NodeIndex> free;
  for (NodeIndex i = 0; i < net.node_count(); ++i)
    if (i != t.source && i != t.sink) free.push_back(i);
  std::vector<Cut> cuts;
  const std::uint64_t count = std::uint64_t{1} << free.size();
  cuts.reserve(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    std::vector<bool> side(static_cast<std::size_t>(net.node_count()), false);
    side[static_cast<std::size_t>(t.source)] = true;
    for (std::size_t b = 0; b < free.size(); ++b)
      if (mask >> b & 1U) side[static_cast<std::size_t>(free[b])] = true;
    cuts.push_back(make_cut(net, std::move(side), t));
  }
  return cuts;
}

std::vector<Cut> enumerate_cuts(const NetworkGraph& net) {
  return enumerate_cuts(net, default_terminals(net));
}

namespace {

// Unit-capacity max-flow on the super-node multigraph, one arc per
// antenna-level edge. Augmenting paths by BFS, scanning arcs in edge-id order.
std::vector<int> max_flow(const NetworkGraph& net, Terminals t) {
  check_terminals(net, t);
  const std::size_t n = static_cast<std::size_t>(net.node_count());
  std::vector<int> flow(static_cast<std::size_t>(net.edge_count()), 0);
  // Residual arcs at node v: (edge id, forward?).
  std::vector<std::vector<std::pair<EdgeId, bool>>> adj(n);
  for (NodeIndex v = 0; v < net.node_count(); ++v) {
    std::vector<std::pair<EdgeId, bool>> arcs;
    for (EdgeId e : net.out_edges(v)) arcs.push_back({e, true});
    for (EdgeId e : net.in_edges(v)) arcs.push_back({e, false});
    std::sort(arcs.begin(), arcs.end());
    adj[static_cast<std::size_t>(v)] = std::move(arcs);
  }
  for (;;) {
    std::vector<std::pair<EdgeId, bool>> via(n, {-1, true});
    std::vector<bool> seen(n, false);
    std::deque<NodeIndex> queue{t.source};
    seen[static_cast<std::size_t>(t.source)] = true;
    while (!queue.empty() && !seen[static_cast<std::size_t>(t.sink)]) {
      NodeIndex v = queue.front();
      queue.pop_front();
      for (auto [e, fwd] : adj[static_cast<std::size_t>(v)]) {
        const Edge& edge = net.edge(e);
        NodeIndex w = fwd ? edge.to.node : edge.from.node;
        bool open = fwd ? flow[static_cast<std::size_t>(e)] == 0 : flow[static_cast<std::size_t>(e)] == 1;
        if (!open || seen[static_cast<std::size_t>(w)]) continue;
        seen[static_cast<std::size_t>(w)] = true;
        via[static_cast<std::size_t>(w)] = {e, fwd};
        queue.push_back(w);
      }
    }
    if (!seen[static_cast<std::size_t>(t.sink)]) break;
    for (NodeIndex v = t.sink; v != t.source;) {
      auto [e, fwd] = via[static_cast<std::size_t>(v)];
      flow[static_cast<std::size_t>(e)] = fwd ? 1 : 0;
      v = fwd ? net.edge(e).from.node : net.edge(e).to.node;
    }
  }
  return flow;
}

}  // namespace

MinCut min_cut_edges(const NetworkGraph& net, Terminals t) {
  auto flow = max_flow(net, t);
  MinCut m;
  for (EdgeId e : net.out_edges(t.source)) m.edges += flow[static_cast<std::size_t>(e)];
  for (EdgeId e : net.in_edges(t.source)) m.edges -= flow[static_cast<std::size_t>(e)];
  return m;
}

MinCut min_cut_edges(const NetworkGraph& net) { return min_cut_edges(net, default_terminals(net)); }

std::vector<NodeIndex> Path::nodes(const NetworkGraph& net) const {
  std::vector<NodeIndex> out;
  if (edges.empty()) return out;
  out.push_back(net.edge(edges.front()).from.node);
  for (EdgeId e : edges) out.push_back(net.edge(e).to.node);
  return out;
}

std::vector<Path> edge_disjoint_paths(const NetworkGraph& net, Terminals t) {
  auto flow = max_flow(net, t);
  std::vector<Path> paths;
  auto next_edge = [&](NodeIndex v) -> EdgeId {
    for (EdgeId e : net.out_edges(v))
      if (flow[static_cast<std::size_t>(e)] == 1) return e;
    return -1;
  };
  for (;;) {
    EdgeId first = next_edge(t.source);
    if (first < 0) break;
    // Walk along flow edges; any closed loop is cancelled on the spot.
    std::vector<EdgeId> walk;
    std::map<NodeIndex, std::size_t> position{{t.source, 0}};
    NodeIndex v = t.source;
    while (v != t.sink) {
      EdgeId e = next_edge(v);
      if (e < 0) throw std::logic_error("edge_disjoint_paths: flow conservation violated");
      NodeIndex w = net.edge(e).to.node;
      walk.push_back(e);
      auto it = position.find(w);
      if (it != position.end()) {
        for (std::size_t k = it->second; k < walk.size(); ++k) flow[static_cast<std::size_t>(walk[k])] = 0;
        walk.resize(it->second);
        for (auto p = position.begin(); p != position.end();)
          p = p->second > it->second ? position.erase(p) : std::next(p);
        v = w;
        continue;
      }
      position[w] = walk.size();
      v = w;
    }
    for (EdgeId e : walk) flow[static_cast<std::size_t>(e)] = 0;
    paths.push_back(Path{std::move(walk)});
  }
  return paths;
}

std::vector<Path> edge_disjoint_paths(const NetworkGraph& net) {
  return edge_disjoint_paths(net, default_terminals(net));
}

CutPattern cut_transfer_pattern(const NetworkGraph& net, const Cut& cut) {
  std::set<AntennaRef> rx, tx;
  for (EdgeId id : cut.crossing_edges) {
    rx.insert(net.edge(id).to);
    tx.insert(net.edge(id).from);
  }
  CutPattern p;
  p.rows.assign(rx.begin(), rx.end());
  p.cols.assign(tx.begin(), tx.end());
  p.matrix = PolyMatrix(static_cast<Eigen::Index>(p.rows.size()), static_cast<Eigen::Index>(p.cols.size()));
  auto index_of = [](const std::vector<AntennaRef>& v, const AntennaRef& a) {
    return static_cast<Eigen::Index>(std::lower_bound(v.begin(), v.end(), a) - v.begin());
  };
  for (EdgeId id : cut.crossing_edges) {
    const Edge& e = net.edge(id);
    p.matrix.add(index_of(p.rows, e.to), index_of(p.cols, e.from), Polynomial::var(e.var));
  }
  return p;
}

namespace {

bool has_edge(const NetworkGraph& net, NodeIndex u, NodeIndex v) {
  for (EdgeId e : net.out_edges(u))
    if (net.edge(e).to.node == v) return true;
  return false;
}

}  // namespace

bool path_has_shortcut(const NetworkGraph& net, std::span<const NodeIndex> path) {
  std::map<NodeIndex, std::size_t> pos;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] < 0 || path[i] >= net.node_count()) throw InputError("path: unknown node");
    if (!pos.emplace(path[i], i).second) throw InputError("path: repeats node '" + net.node(path[i]).id + "'");
    if (i > 0 && !has_edge(net, path[i - 1], path[i]))
      throw InputError("path: no edge from '" + net.node(path[i - 1]).id + "' to '" + net.node(path[i]).id + "'");
  }
  for (const auto& e : net.edges()) {
    auto a = pos.find(e.from.node);
    auto b = pos.find(e.to.node);
    if (a != pos.end() && b != pos.end() && b->second > a->second + 1) return true;
  }
  return false;
}

bool path_has_shortcut(const NetworkGraph& net, const Path& path) {
  for (std::size_t i = 0; i + 1 < path.edges.size(); ++i)
    if (net.edge(path.edges[i]).to.node != net.edge(path.edges[i + 1]).from.node)
      throw InputError("path: consecutive edges do not meet");
  auto nodes = path.nodes(net);
  return path_has_shortcut(net, std::span<const NodeIndex>(nodes));
}

bool network_is_acyclic(const NetworkGraph& net) {
  std::vector<int> indegree(static_cast<std::size_t>(net.node_count()), 0);
  for (const auto& e : net.edges()) ++indegree[static_cast<std::size_t>(e.to.node)];
  std::deque<NodeIndex> ready;
  for (NodeIndex v = 0; v < net.node_count(); ++v)
    if (indegree[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
  int visited = 0;
  while (!ready.empty()) {
    NodeIndex v = ready.front();
    ready.pop_front();
    ++visited;
    for (EdgeId e : net.out_edges(v))
      if (--indegree[static_cast<std::size_t>(net.edge(e).to.node)] == 0) ready.push_back(net.edge(e).to.node);
  }
  return visited == net.node_count();
}

ScheduleReport validate_schedule(const NetworkGraph& net, const Schedule& schedule) {
  ScheduleReport report;
  for (int s = 0; s < schedule.total_slots(); ++s) {
    const Slot& slot = schedule.slots[static_cast<std::size_t>(s)];
    std::vector<bool> listens(static_cast<std::size_t>(net.node_count()), false);
    std::vector<bool> sends(static_cast<std::size_t>(net.node_count()), false);
    for (EdgeId e : slot.live) {
      if (e < 0 || e >= net.edge_count()) {
        report.violations.push_back({s, "", "live edge " + std::to_string(e) + " does not exist"});
        continue;
      }
      sends[static_cast<std::size_t>(net.edge(e).from.node)] = true;
      listens[static_cast<std::size_t>(net.edge(e).to.node)] = true;
    }
    for (NodeIndex v = 0; v < net.node_count(); ++v)
      if (net.node(v).duplex == Duplex::Half && listens[static_cast<std::size_t>(v)] &&
          sends[static_cast<std::size_t>(v)])
        report.violations.push_back({s, net.node(v).id, "half-duplex node listens and transmits"});
    for (const Route& r : slot.routes) {
      if (r.node < 0 || r.node >= net.node_count()) {
        report.violations.push_back({s, "", "route refers to unknown node"});
        continue;
      }
      const int a = net.node(r.node).antennas;
      if (r.tx_antenna < 0 || r.tx_antenna >= a || r.rx_antenna < 0 || r.rx_antenna >= a)
        report.violations.push_back({s, net.node(r.node).id, "route antenna out of range"});
    }
  }
  return report;
}

}  // namespace dmtlab
