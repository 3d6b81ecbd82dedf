// Network, tree and protocol model shared by every analysis layer.
//
// All internal arithmetic is carried out in symbol-time units (16 us for the
// 2.4 GHz O-QPSK PHY). Rates given in packets/second are converted with
// ProtocolParams::symbol_seconds at the I/O boundary only.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsnqos {

using NodeId = int;
inline constexpr NodeId kSinkId = 0;
inline constexpr NodeId kNoParent = -1;

/// Raised when an input violates a model precondition.
class ModelError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct ProtocolParams
{
  int n_c = 5; ///< successive CCA failures before discard (macMaxCSMABackoffs + 1)
  int n_t = 4; ///< transmission failures before discard (aMaxFrameRetries + 1)
  int be_min = 3;
  int be_max = 5;
  double slot_symbols = 20.0;
  double cca_symbols = 8.0;
  double turnaround_symbols = 12.0;
  double ack_symbols = 22.0;
  double symbol_seconds = 16e-6;
  int packet_bytes = 131;

  void validate () const;
  bool operator== (const ProtocolParams&) const = default;
};

/// Data-frame airtime in symbols: two symbols per byte.
double tx_duration (const ProtocolParams& params);

/// Mean duration of backoff stage k (window mean plus one CCA), k = 0..n_c-1.
std::vector<double> backoff_stage_means (const ProtocolParams& params);

/// 1 + a + ... + a^(n-1)
double geometric_sum (double a, int n);

/// d/da of geometric_sum: 1 + 2a + ... + (n-1)a^(n-2)
double geometric_sum_derivative (double a, int n);

/// Mean time in backoff of a HOL packet before transmission or CCA discard.
double mean_backoff (const ProtocolParams& params, double alpha);

/// CCA attempt rate while in backoff, per symbol.
double beta_from_alpha (const ProtocolParams& params, double alpha);

inline double
per_second_to_per_symbol (double rate, const ProtocolParams& params)
{
  return rate * params.symbol_seconds;
}

inline double
per_symbol_to_per_second (double rate, const ProtocolParams& params)
{
  return rate / params.symbol_seconds;
}

inline double
symbols_to_seconds (double symbols, const ProtocolParams& params)
{
  return symbols * params.symbol_seconds;
}

inline double
seconds_to_symbols (double seconds, const ProtocolParams& params)
{
  return seconds / params.symbol_seconds;
}

enum class NodeKind
{
  Source,
  Relay,
  Sink
};

std::string to_string (NodeKind kind);
NodeKind node_kind_from_string (const std::string& s);

struct Node
{
  NodeId id = 0;
  NodeKind kind = NodeKind::Relay;
  double x = 0.0;
  double y = 0.0;
};

struct Edge
{
  NodeId a = 0;
  NodeId b = 0;
  double per = 0.0;
};

/// Admissible-link graph over sources, candidate relays and the sink.
/// Node ids are dense, 0..size()-1, and the sink is id 0.
class NetworkGraph
{
public:
  NetworkGraph () = default;
  NetworkGraph (std::vector<Node> nodes, std::vector<Edge> edges, double worst_case_per);

  std::size_t size () const { return nodes_.size (); }
  const std::vector<Node>& nodes () const { return nodes_; }
  const std::vector<Edge>& edges () const { return edges_; }
  const Node& node (NodeId id) const { return nodes_.at (static_cast<std::size_t> (id)); }
  double worst_case_per () const { return per_; }

  const std::vector<NodeId>& neighbors (NodeId id) const
  {
    return adjacency_.at (static_cast<std::size_t> (id));
  }
  bool has_edge (NodeId a, NodeId b) const;
  std::optional<double> edge_per (NodeId a, NodeId b) const;

  std::vector<NodeId> sources () const;
  std::vector<NodeId> relays () const;

private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  double per_ = 0.0;
  std::vector<std::vector<NodeId>> adjacency_;
  std::map<std::pair<NodeId, NodeId>, double> edge_index_;
};

/// A tree rooted at the sink, stored as a parent array indexed by node id.
/// Nodes outside the tree have kNoParent (as does the sink).
class TreeTopology
{
public:
  TreeTopology () = default;

  /// Throws ModelError on cycles, on sources that do not reach the sink, or
  /// on a parent array that is inconsistent with the source list.
  TreeTopology (std::vector<NodeId> parent, std::vector<NodeId> sources);

  std::size_t id_space () const { return parent_.size (); }
  NodeId parent (NodeId id) const { return parent_.at (static_cast<std::size_t> (id)); }
  const std::vector<NodeId>& parents () const { return parent_; }
  const std::vector<NodeId>& sources () const { return sources_; }
  bool is_source (NodeId id) const;

  /// Transmitting nodes (every tree member except the sink), ascending id.
  const std::vector<NodeId>& members () const { return members_; }
  bool contains (NodeId id) const;

  /// Nodes on the path from source k to the sink, source first, sink excluded.
  std::vector<NodeId> path (NodeId source) const;
  int hops (NodeId source) const;
  int total_hops () const;
  int max_hops () const;

  /// Number of sources routed through node j (m_j); 0 for non-members.
  int sources_through (NodeId j) const;
  bool on_path (NodeId source, NodeId j) const;

  /// Children (predecessors) of a node within the tree.
  const std::vector<NodeId>& children (NodeId id) const
  {
    return children_.at (static_cast<std::size_t> (id));
  }
  /// Members ordered so that every node appears after all of its descendants.
  const std::vector<NodeId>& leaves_first () const { return leaves_first_; }

  bool operator== (const TreeTopology& o) const
  {
    return parent_ == o.parent_ && sources_ == o.sources_;
  }

private:
  std::vector<NodeId> parent_;
  std::vector<NodeId> sources_;
  std::vector<NodeId> members_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<NodeId> leaves_first_;
  std::vector<int> through_;
};

/// Relay count of a tree: members that are not sources.
int relay_count (const TreeTopology& tree);

/// Exogenous source rates in packets/second.
class ArrivalRates
{
public:
  ArrivalRates () = default;
  explicit ArrivalRates (std::map<NodeId, double> per_second);

  static ArrivalRates uniform (const std::vector<NodeId>& sources, double per_second);

  double at (NodeId source) const;
  bool has (NodeId source) const { return rates_.count (source) > 0; }
  const std::map<NodeId, double>& per_second () const { return rates_; }

  /// Exogenous rate at node id (0 for relays), packets/symbol.
  double per_symbol (NodeId id, const ProtocolParams& params) const;

  /// Weighted total load sum_k lambda_k h_k, packets/second.
  double total_load (const TreeTopology& tree) const;

private:
  std::map<NodeId, double> rates_;
};

/// nu_j = sum_k z_{k,j} lambda_k, indexed by node id, in the units of the
/// rates (packets/second). The sink and non-members get 0.
std::vector<double> node_loads (const TreeTopology& tree, const ArrivalRates& rates);

struct TreeVerdict
{
  bool ok = true;
  std::string reason;
  std::optional<NodeId> node;
  explicit operator bool () const { return ok; }
};

/// Accepts iff every tree edge is a graph edge with PER <= l and every
/// source is within h_max hops of the sink.
TreeVerdict validate_tree (const TreeTopology& tree, const NetworkGraph& graph, int h_max);

} // namespace wsnqos
