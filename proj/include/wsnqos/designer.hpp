// Tree construction and selection: shortest-path trees, relay-budgeted
// hop-constrained Steiner trees, relay-subset candidate enumeration and
// equal-rate throughput search.

#pragma once

#include "wsnqos/bounds.hpp"
#include "wsnqos/model.hpp"
#include "wsnqos/rng.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace wsnqos {

/// Raised when some source cannot reach the sink over the allowed nodes.
class DisconnectedSource : public ModelError
{
public:
  explicit DisconnectedSource (NodeId source);
  NodeId source () const { return source_; }

private:
  NodeId source_;
};

/// Hop-count BFS tree from the sink, pruned to the source paths.
/// `allowed` (indexed by id) restricts which relays may be used; sources and
/// the sink are always allowed. Ties between equally short parents go to the
/// smallest id, or are drawn from `rng` when given.
TreeTopology shortest_path_tree (const NetworkGraph& graph,
                                 const std::vector<bool>* allowed = nullptr, Rng* rng = nullptr);

struct DesignProblem
{
  NetworkGraph graph;
  int h_max = 5;
  int n_max = 4;
  int restarts = 10;
  std::uint64_t seed = 1;
};

struct SteinerResult
{
  bool feasible = false;
  TreeTopology tree; ///< best feasible tree, or a best-effort one
  int relay_count = 0;
  int total_hops = 0;
  int feasible_restarts = 0;
  std::string reason;
};

/// Restarted local search: from an SPT (deterministic on the first restart,
/// random tie-breaking afterwards), repeatedly drop the relay whose removal
/// keeps an SPT over the remaining nodes hop-feasible with the fewest total
/// hops, until the relay count is within budget. Returns the feasible
/// candidate with the fewest total hops, then fewest relays.
SteinerResult steiner_with_budget (const DesignProblem& problem);

/// Lazily yields SPTs over sources plus every relay subset of size
/// 0..relay_count(base). Disconnected, hop-violating and duplicate trees are
/// skipped.
class CandidateEnumerator
{
public:
  CandidateEnumerator (const NetworkGraph& graph, int h_max, const TreeTopology& base,
                       std::uint64_t cap = 1000000);

  std::optional<TreeTopology> next ();

  std::uint64_t subset_count () const { return total_; }
  std::uint64_t visited () const { return visited_; }
  std::uint64_t disconnected () const { return disconnected_; }
  std::uint64_t hop_violations () const { return hop_violations_; }
  std::uint64_t duplicates () const { return duplicates_; }

private:
  bool advance ();

  const NetworkGraph& graph_;
  int h_max_;
  std::vector<NodeId> relays_;
  int max_size_;
  int size_ = 0;
  std::vector<int> combo_;
  bool started_ = false;
  bool done_ = false;
  std::uint64_t total_ = 0;
  std::uint64_t visited_ = 0;
  std::uint64_t disconnected_ = 0;
  std::uint64_t hop_violations_ = 0;
  std::uint64_t duplicates_ = 0;
  std::set<std::vector<NodeId>> seen_;
};

/// All candidates at once.
std::vector<TreeTopology> enumerate_candidates (const NetworkGraph& graph, int h_max,
                                                const TreeTopology& base,
                                                std::uint64_t cap = 1000000);

enum class Layer
{
  Detailed,
  Simplified
};

std::string to_string (Layer layer);
Layer layer_from_string (const std::string& s);

struct SearchOptions
{
  double first = 0.001;
  double step = 0.1;
  double max_rate = 1000.0;
  bool check_delay = false;
  /// Grid points probed past the first failure to detect non-monotone verdicts.
  int probe_beyond = 3;
};

struct SearchPoint
{
  double rate = 0.0;
  bool ok = false;
  bool converged = true;
  double max_delta = 0.0;
  double max_hop_delay = 0.0; ///< seconds; 0 when delay was not evaluated
  std::string note;
};

struct SearchResult
{
  double lambda_hat = 0.0; ///< 0 when even the first grid rate fails
  std::vector<SearchPoint> trace;
  int monotonicity_violations = 0;
};

/// Evaluates one equal-rate point against the per-link targets.
SearchPoint evaluate_rate (const TreeTopology& tree, double rate, double l,
                           const ProtocolParams& params, const QosTargets& qos, Layer layer,
                           bool check_delay);

/// Largest grid rate (first, step, 2 step, ...) up to which every node meets
/// the discard target (and optionally the per-hop delay target).
SearchResult throughput_search (const TreeTopology& tree, double l, const ProtocolParams& params,
                                const QosTargets& qos, Layer layer,
                                const SearchOptions& options = {});

struct Candidate
{
  TreeTopology tree;
  double lambda_hat = 0.0;
};

/// Index of the best candidate: largest lambda_hat, then fewer relays, then
/// fewer total hops. Throws on an empty set.
std::size_t select_best (const std::vector<Candidate>& candidates);

struct DesignReport
{
  TreeTopology tree;
  int relay_count = 0;
  int total_hops = 0;
  double inner_bound = 0.0; ///< lambda tilde
  std::optional<double> searched_throughput;
  std::vector<SearchPoint> trace;
};

DesignReport make_report (const TreeTopology& tree, const ThroughputBounds& bounds);

} // namespace wsnqos
