#include "wsnqos/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wsnqos {

void
ProtocolParams::validate () const
{
  if (n_c < 1)
    throw ModelError ("n_c must be >= 1");
  if (n_t < 1)
    throw ModelError ("n_t must be >= 1");
  if (be_min < 0 || be_max < be_min)
    throw ModelError ("backoff exponents must satisfy 0 <= be_min <= be_max");
  if (be_max > 30)
    throw ModelError ("be_max out of range");
  if (packet_bytes <= 0)
    throw ModelError ("packet_bytes must be positive");
  if (!(slot_symbols > 0.0) || cca_symbols < 0.0 || turnaround_symbols < 0.0
      || ack_symbols < 0.0 || !(symbol_seconds > 0.0))
    throw ModelError ("timing parameters must be positive");
}

double
tx_duration (const ProtocolParams& params)
{
  if (params.packet_bytes <= 0)
    throw ModelError ("packet_bytes must be positive");
  return 2.0 * params.packet_bytes;
}

std::vector<double>
backoff_stage_means (const ProtocolParams& params)
{
  params.validate ();
  std::vector<double> means;
  means.reserve (static_cast<std::size_t> (params.n_c));
  for (int k = 0; k < params.n_c; ++k)
    {
      int be = std::min (params.be_min + k, params.be_max);
      double window = std::ldexp (1.0, be) - 1.0;
      means.push_back (params.slot_symbols * window / 2.0 + params.cca_symbols);
    }
  return means;
}

double
geometric_sum (double a, int n)
{
  double sum = 0.0;
  double term = 1.0;
  for (int k = 0; k < n; ++k)
    {
      sum += term;
      term *= a;
    }
  return sum;
}

double
geometric_sum_derivative (double a, int n)
{
  double sum = 0.0;
  double term = 1.0; // a^(k-1)
  for (int k = 1; k < n; ++k)
    {
      sum += k * term;
      term *= a;
    }
  return sum;
}

double
mean_backoff (const ProtocolParams& params, double alpha)
{
  if (alpha < 0.0 || alpha > 1.0)
    throw ModelError ("alpha must lie in [0,1]");
  double sum = 0.0;
  double weight = 1.0;
  for (double stage : backoff_stage_means (params))
    {
      sum += weight * stage;
      weight *= alpha;
    }
  return sum;
}

double
beta_from_alpha (const ProtocolParams& params, double alpha)
{
  return geometric_sum (alpha, params.n_c) / mean_backoff (params, alpha);
}

std::string
to_string (NodeKind kind)
{
  switch (kind)
    {
    case NodeKind::Source:
      return "source";
    case NodeKind::Relay:
      return "relay";
    case NodeKind::Sink:
      return "sink";
    }
  return "relay";
}

NodeKind
node_kind_from_string (const std::string& s)
{
  if (s == "source")
    return NodeKind::Source;
  if (s == "relay")
    return NodeKind::Relay;
  if (s == "sink")
    return NodeKind::Sink;
  throw ModelError ("unknown node kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// NetworkGraph

NetworkGraph::NetworkGraph (std::vector<Node> nodes, std::vector<Edge> edges, double worst_case_per)
  : nodes_ (std::move (nodes)), edges_ (std::move (edges)), per_ (worst_case_per)
{
  if (per_ < 0.0 || per_ >= 1.0)
    throw ModelError ("worst-case PER must lie in [0,1)");
  int sinks = 0;
  for (std::size_t i = 0; i < nodes_.size (); ++i)
    {
      if (nodes_[i].id != static_cast<NodeId> (i))
        throw ModelError ("node ids must be dense and ordered (expected id "
                          + std::to_string (i) + ")");
      if (nodes_[i].kind == NodeKind::Sink)
        ++sinks;
    }
  if (sinks != 1)
    throw ModelError ("graph must contain exactly one sink");
  if (nodes_.front ().kind != NodeKind::Sink)
    throw ModelError ("sink must have id 0");

  adjacency_.assign (nodes_.size (), {});
  for (const Edge& e : edges_)
    {
      auto n = static_cast<NodeId> (nodes_.size ());
      if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n)
        throw ModelError ("edge references unknown node");
      if (e.a == e.b)
        throw ModelError ("self loop on node " + std::to_string (e.a));
      if (e.per < 0.0 || e.per > per_)
        throw ModelError ("edge (" + std::to_string (e.a) + "," + std::to_string (e.b)
                          + ") PER exceeds the worst-case bound");
      auto key = std::minmax (e.a, e.b);
      if (!edge_index_.emplace (std::pair{key.first, key.second}, e.per).second)
        throw ModelError ("duplicate edge (" + std::to_string (e.a) + ","
                          + std::to_string (e.b) + ")");
      adjacency_[static_cast<std::size_t> (e.a)].push_back (e.b);
      adjacency_[static_cast<std::size_t> (e.b)].push_back (e.a);
    }
  for (auto& adj : adjacency_)
    std::sort (adj.begin (), adj.end ());
}

bool
NetworkGraph::has_edge (NodeId a, NodeId b) const
{
  return edge_per (a, b).has_value ();
}

std::optional<double>
NetworkGraph::edge_per (NodeId a, NodeId b) const
{
  auto key = std::minmax (a, b);
  auto it = edge_index_.find ({key.first, key.second});
  if (it == edge_index_.end ())
    return std::nullopt;
  return it->second;
}

std::vector<NodeId>
NetworkGraph::sources () const
{
  std::vector<NodeId> out;
  for (const Node& n : nodes_)
    if (n.kind == NodeKind::Source)
      out.push_back (n.id);
  return out;
}

std::vector<NodeId>
NetworkGraph::relays () const
{
  std::vector<NodeId> out;
  for (const Node& n : nodes_)
    if (n.kind == NodeKind::Relay)
      out.push_back (n.id);
  return out;
}

// ---------------------------------------------------------------------------
// TreeTopology

TreeTopology::TreeTopology (std::vector<NodeId> parent, std::vector<NodeId> sources)
  : parent_ (std::move (parent)), sources_ (std::move (sources))
{
  const auto n = static_cast<NodeId> (parent_.size ());
  if (n == 0)
    throw ModelError ("tree has no nodes");
  if (parent_[kSinkId] != kNoParent)
    throw ModelError ("sink must not have a parent");
  std::sort (sources_.begin (), sources_.end ());
  if (std::adjacent_find (sources_.begin (), sources_.end ()) != sources_.end ())
    throw ModelError ("duplicate source id");

  for (NodeId v = 0; v < n; ++v)
    {
      NodeId p = parent_[static_cast<std::size_t> (v)];
      if (p != kNoParent && (p < 0 || p >= n || p == v))
        throw ModelError ("invalid parent for node " + std::to_string (v));
    }

  // Every non-sink node with a parent must reach the sink without revisiting.
  std::vector<char> in_tree (static_cast<std::size_t> (n), 0);
  in_tree[kSinkId] = 1;
  for (NodeId v = 1; v < n; ++v)
    {
      if (parent_[static_cast<std::size_t> (v)] == kNoParent)
        continue;
      NodeId cur = v;
      int steps = 0;
      while (cur != kSinkId)
        {
          cur = parent_[static_cast<std::size_t> (cur)];
          if (cur == kNoParent)
            throw ModelError ("node " + std::to_string (v) + " does not reach the sink");
          if (++steps > n)
            throw ModelError ("cycle through node " + std::to_string (v));
        }
      in_tree[static_cast<std::size_t> (v)] = 1;
    }
  for (NodeId s : sources_)
    {
      if (s <= 0 || s >= n)
        throw ModelError ("source id out of range: " + std::to_string (s));
      if (!in_tree[static_cast<std::size_t> (s)])
        throw ModelError ("source " + std::to_string (s) + " is not connected to the sink");
    }

  children_.assign (static_cast<std::size_t> (n), {});
  for (NodeId v = 1; v < n; ++v)
    if (in_tree[static_cast<std::size_t> (v)])
      {
        members_.push_back (v);
        children_[static_cast<std::size_t> (parent_[static_cast<std::size_t> (v)])].push_back (v);
      }

  through_.assign (static_cast<std::size_t> (n), 0);
  for (NodeId s : sources_)
    for (NodeId cur = s; cur != kSinkId; cur = parent_[static_cast<std::size_t> (cur)])
      ++through_[static_cast<std::size_t> (cur)];

  // Members that carry no source traffic would be idle leaves; reject them so
  // that every member is a transmitter.
  for (NodeId v : members_)
    if (through_[static_cast<std::size_t> (v)] == 0)
      throw ModelError ("node " + std::to_string (v) + " is in the tree but carries no source");

  // Post-order by depth: deeper nodes first.
  std::vector<int> depth (static_cast<std::size_t> (n), 0);
  for (NodeId v : members_)
    {
      int d = 0;
      for (NodeId cur = v; cur != kSinkId; cur = parent_[static_cast<std::size_t> (cur)])
        ++d;
      depth[static_cast<std::size_t> (v)] = d;
    }
  leaves_first_ = members_;
  std::stable_sort (leaves_first_.begin (), leaves_first_.end (), [&] (NodeId a, NodeId b) {
    return depth[static_cast<std::size_t> (a)] > depth[static_cast<std::size_t> (b)];
  });
}

bool
TreeTopology::is_source (NodeId id) const
{
  return std::binary_search (sources_.begin (), sources_.end (), id);
}

bool
TreeTopology::contains (NodeId id) const
{
  return std::binary_search (members_.begin (), members_.end (), id);
}

std::vector<NodeId>
TreeTopology::path (NodeId source) const
{
  if (!is_source (source))
    throw ModelError ("not a source: " + std::to_string (source));
  std::vector<NodeId> out;
  for (NodeId cur = source; cur != kSinkId; cur = parent (cur))
    out.push_back (cur);
  return out;
}

int
TreeTopology::hops (NodeId source) const
{
  return static_cast<int> (path (source).size ());
}

int
TreeTopology::total_hops () const
{
  int total = 0;
  for (NodeId s : sources_)
    total += hops (s);
  return total;
}

int
TreeTopology::max_hops () const
{
  int best = 0;
  for (NodeId s : sources_)
    best = std::max (best, hops (s));
  return best;
}

int
TreeTopology::sources_through (NodeId j) const
{
  if (j < 0 || static_cast<std::size_t> (j) >= through_.size ())
    return 0;
  return through_[static_cast<std::size_t> (j)];
}

bool
TreeTopology::on_path (NodeId source, NodeId j) const
{
  for (NodeId cur = source; cur != kSinkId; cur = parent (cur))
    if (cur == j)
      return true;
  return false;
}

int
relay_count (const TreeTopology& tree)
{
  int count = 0;
  for (NodeId v : tree.members ())
    if (!tree.is_source (v))
      ++count;
  return count;
}

// ---------------------------------------------------------------------------
// ArrivalRates

ArrivalRates::ArrivalRates (std::map<NodeId, double> per_second)
  : rates_ (std::move (per_second))
{
  for (const auto& [id, rate] : rates_)
    if (!(rate >= 0.0) || !std::isfinite (rate))
      throw ModelError ("arrival rate of source " + std::to_string (id) + " must be >= 0");
}

ArrivalRates
ArrivalRates::uniform (const std::vector<NodeId>& sources, double per_second)
{
  std::map<NodeId, double> m;
  for (NodeId s : sources)
    m[s] = per_second;
  return ArrivalRates (std::move (m));
}

double
ArrivalRates::at (NodeId source) const
{
  auto it = rates_.find (source);
  if (it == rates_.end ())
    throw ModelError ("missing arrival rate for source " + std::to_string (source));
  return it->second;
}

double
ArrivalRates::per_symbol (NodeId id, const ProtocolParams& params) const
{
  auto it = rates_.find (id);
  return it == rates_.end () ? 0.0 : per_second_to_per_symbol (it->second, params);
}

double
ArrivalRates::total_load (const TreeTopology& tree) const
{
  double total = 0.0;
  for (NodeId s : tree.sources ())
    total += at (s) * tree.hops (s);
  return total;
}

std::vector<double>
node_loads (const TreeTopology& tree, const ArrivalRates& rates)
{
  std::vector<double> nu (tree.id_space (), 0.0);
  for (NodeId s : tree.sources ())
    {
      double lambda = rates.at (s);
      for (NodeId cur = s; cur != kSinkId; cur = tree.parent (cur))
        nu[static_cast<std::size_t> (cur)] += lambda;
    }
  return nu;
}

TreeVerdict
validate_tree (const TreeTopology& tree, const NetworkGraph& graph, int h_max)
{
  TreeVerdict v;
  if (tree.id_space () != graph.size ())
    {
      v.ok = false;
      v.reason = "tree and graph have different node counts";
      return v;
    }
  for (NodeId s : tree.sources ())
    if (graph.node (s).kind != NodeKind::Source)
      {
        v.ok = false;
        v.reason = "tree source " + std::to_string (s) + " is not a graph source";
        v.node = s;
        return v;
      }
  for (NodeId s : graph.sources ())
    if (!tree.is_source (s))
      {
        v.ok = false;
        v.reason = "graph source " + std::to_string (s) + " is not spanned";
        v.node = s;
        return v;
      }
  for (NodeId u : tree.members ())
    {
      NodeId p = tree.parent (u);
      auto per = graph.edge_per (u, p);
      if (!per)
        {
          v.ok = false;
          v.reason = "tree edge (" + std::to_string (u) + "," + std::to_string (p)
                     + ") is not a graph edge";
          v.node = u;
          return v;
        }
      if (*per > graph.worst_case_per ())
        {
          v.ok = false;
          v.reason = "tree edge (" + std::to_string (u) + "," + std::to_string (p)
                     + ") exceeds the PER bound";
          v.node = u;
          return v;
        }
    }
  for (NodeId s : tree.sources ())
    if (tree.hops (s) > h_max)
      {
        v.ok = false;
        v.reason = "source " + std::to_string (s) + " uses " + std::to_string (tree.hops (s))
                   + " hops > h_max " + std::to_string (h_max);
        v.node = s;
        return v;
      }
  return v;
}

} // namespace wsnqos
