#pragma once

// Multi-antenna relay networks: super-nodes carrying antennas, antenna-level
// directed edges each carrying its own i.i.d. fading variable.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dmtlab/polynomial.hpp"

namespace dmtlab {

using NodeIndex = int;
using EdgeId = int;

enum class Role { Source, Relay, Sink };
enum class Duplex { Full, Half };

struct SuperNode {
  std::string id;
  int antennas = 1;
  Role role = Role::Relay;
  Duplex duplex = Duplex::Full;
};

struct AntennaRef {
  NodeIndex node = 0;
  int antenna = 0;
  auto operator<=>(const AntennaRef&) const = default;
};

struct Edge {
  EdgeId id = 0;
  AntennaRef from;
  AntennaRef to;
  /// Fading variable carried by this edge; equal to `id`.
  VarId var = 0;
  std::string label;
};

/// Edge as supplied by a caller, before ids are assigned.
struct EdgeSpec {
  AntennaRef from;
  AntennaRef to;
  std::string label;
};

class NetworkGraph {
 public:
  NetworkGraph() = default;
  NetworkGraph(std::vector<SuperNode> nodes, const std::vector<EdgeSpec>& edges);

  const std::vector<SuperNode>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const SuperNode& node(NodeIndex i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  const Edge& edge(EdgeId e) const { return edges_.at(static_cast<std::size_t>(e)); }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  std::optional<NodeIndex> find_node(const std::string& id) const;
  NodeIndex node_index(const std::string& id) const;

  /// Edge ids leaving / entering a super-node, in increasing id order.
  const std::vector<EdgeId>& out_edges(NodeIndex n) const { return out_.at(static_cast<std::size_t>(n)); }
  const std::vector<EdgeId>& in_edges(NodeIndex n) const { return in_.at(static_cast<std::size_t>(n)); }

  std::vector<NodeIndex> sources() const;
  std::vector<NodeIndex> sinks() const;
  /// The unique source / sink; throws InputError if there is not exactly one.
  NodeIndex source() const;
  NodeIndex sink() const;

  bool all_full_duplex() const;
  bool single_antenna() const;
  int max_antennas() const;
  /// Human-readable variable names, indexed by VarId.
  std::vector<std::string> variable_names() const;

 private:
  std::vector<SuperNode> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
};

/// Source and sink of one flow.
struct Terminals {
  NodeIndex source = 0;
  NodeIndex sink = 0;
};

/// The unique source and sink of a single-flow network.
Terminals default_terminals(const NetworkGraph& net);

struct Cut {
  /// Membership by node index.
  std::vector<bool> source_side;
  /// Edges from the source side to its complement, increasing id order.
  std::vector<EdgeId> crossing_edges;

  std::vector<NodeIndex> source_nodes() const;
};

/// Builds the cut for a given source-side membership; validates terminals.
Cut make_cut(const NetworkGraph& net, std::vector<bool> source_side, Terminals t);

inline constexpr int kDefaultCutNodeLimit = 20;

/// Every source/sink-separating partition, each exactly once. The relays'
/// membership follows the binary counter order, so the first cut is {source}.
std::vector<Cut> enumerate_cuts(const NetworkGraph& net, Terminals t,
                                int node_limit = kDefaultCutNodeLimit);
std::vector<Cut> enumerate_cuts(const NetworkGraph& net);

struct MinCut {
  int edges = 0;
  bool disconnected() const { return edges == 0; }
};

/// Minimum number of antenna-level edges over all cuts, via unit-capacity
/// max-flow.
MinCut min_cut_edges(const NetworkGraph& net, Terminals t);
MinCut min_cut_edges(const NetworkGraph& net);

/// A source-to-sink path as a sequence of antenna-level edges. Consecutive
/// edges meet at the same super-node; they may use different antennas there.
struct Path {
  std::vector<EdgeId> edges;
  std::vector<NodeIndex> nodes(const NetworkGraph& net) const;
  std::size_t length() const { return edges.size(); }
};

/// min_cut_edges(net) pairwise edge-disjoint paths from the flow
/// decomposition of an integral max-flow. Ties go to the smallest edge id.
std::vector<Path> edge_disjoint_paths(const NetworkGraph& net, Terminals t);
std::vector<Path> edge_disjoint_paths(const NetworkGraph& net);

/// Transfer pattern of a cut: rows are the receiving antennas (sink side) of
/// the crossing edges, columns the transmitting antennas (source side), in
/// (node, antenna) order. Entry = edge variable, or a structural zero.
struct CutPattern {
  PolyMatrix matrix;
  std::vector<AntennaRef> rows;
  std::vector<AntennaRef> cols;
};

CutPattern cut_transfer_pattern(const NetworkGraph& net, const Cut& cut);

/// True when some edge jumps forward from a node of `path` to a later,
/// non-consecutive node of the same path.
bool path_has_shortcut(const NetworkGraph& net, std::span<const NodeIndex> path);
bool path_has_shortcut(const NetworkGraph& net, const Path& path);

bool network_is_acyclic(const NetworkGraph& net);

/// Per-slot set of live edges plus the AF bookkeeping the channel builder needs.
struct Route {
  NodeIndex node = 0;
  /// Transmitting antenna forwards the buffer of this receiving antenna.
  int tx_antenna = 0;
  int rx_antenna = 0;
};

struct Slot {
  std::vector<EdgeId> live;
  std::vector<Route> routes;
  /// The source sends a fresh data symbol on each transmitting antenna;
  /// otherwise it sends a zero symbol.
  bool source_fresh = true;
};

struct Schedule {
  std::vector<Slot> slots;
  int total_slots() const { return static_cast<int>(slots.size()); }
};

struct ScheduleViolation {
  int slot = 0;
  std::string node;
  std::string reason;
};

struct ScheduleReport {
  std::vector<ScheduleViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks that live edges exist and that no half-duplex node both listens
/// and transmits in one slot.
ScheduleReport validate_schedule(const NetworkGraph& net, const Schedule& schedule);

}  // namespace dmtlab
