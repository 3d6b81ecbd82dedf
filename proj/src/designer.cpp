#include "wsnqos/designer.hpp"

#include "wsnqos/detailed.hpp"
#include "wsnqos/simplified.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace wsnqos {

DisconnectedSource::DisconnectedSource (NodeId source)
  : ModelError ("source " + std::to_string (source) + " cannot reach the sink"), source_ (source)
{
}

TreeTopology
shortest_path_tree (const NetworkGraph& graph, const std::vector<bool>* allowed, Rng* rng)
{
  const std::size_t n = graph.size ();
  if (allowed && allowed->size () != n)
    throw ModelError ("allowed mask has the wrong size");
  auto usable = [&] (NodeId v) {
    NodeKind k = graph.node (v).kind;
    return k != NodeKind::Relay || !allowed || (*allowed)[static_cast<std::size_t> (v)];
  };

  constexpr int kUnreached = std::numeric_limits<int>::max ();
  std::vector<int> dist (n, kUnreached);
  std::deque<NodeId> queue{kSinkId};
  dist[kSinkId] = 0;
  while (!queue.empty ())
    {
      NodeId u = queue.front ();
      queue.pop_front ();
      for (NodeId w : graph.neighbors (u))
        if (usable (w) && dist[static_cast<std::size_t> (w)] == kUnreached)
          {
            dist[static_cast<std::size_t> (w)] = dist[static_cast<std::size_t> (u)] + 1;
            queue.push_back (w);
          }
    }

  std::vector<NodeId> sources = graph.sources ();
  for (NodeId s : sources)
    if (dist[static_cast<std::size_t> (s)] == kUnreached)
      throw DisconnectedSource (s);

  std::vector<NodeId> choice (n, kNoParent);
  auto parent_of = [&] (NodeId v) {
    NodeId& c = choice[static_cast<std::size_t> (v)];
    if (c != kNoParent)
      return c;
    int want = dist[static_cast<std::size_t> (v)] - 1;
    std::vector<NodeId> options;
    for (NodeId u : graph.neighbors (v)) // ascending ids
      if (usable (u) && dist[static_cast<std::size_t> (u)] == want)
        options.push_back (u);
    c = rng ? options[rng->below (options.size ())] : options.front ();
    return c;
  };

  std::vector<NodeId> parent (n, kNoParent);
  for (NodeId s : sources)
    for (NodeId cur = s; cur != kSinkId;)
      {
        NodeId p = parent_of (cur);
        parent[static_cast<std::size_t> (cur)] = p;
        cur = p;
      }
  return TreeTopology (std::move (parent), std::move (sources));
}

namespace {

std::vector<bool>
mask_of (const NetworkGraph& graph, const TreeTopology& tree)
{
  std::vector<bool> mask (graph.size (), false);
  for (NodeId v : tree.members ())
    mask[static_cast<std::size_t> (v)] = true;
  return mask;
}

bool
better (const TreeTopology& a, const TreeTopology& b)
{
  int ha = a.total_hops (), hb = b.total_hops ();
  if (ha != hb)
    return ha < hb;
  return relay_count (a) < relay_count (b);
}

} // namespace

SteinerResult
steiner_with_budget (const DesignProblem& problem)
{
  const NetworkGraph& g = problem.graph;
  if (problem.n_max < 0 || problem.h_max < 1 || problem.restarts < 1)
    throw ModelError ("invalid design problem (n_max >= 0, h_max >= 1, restarts >= 1)");

  SteinerResult result;
  std::optional<TreeTopology> best_feasible;
  std::optional<TreeTopology> best_effort;
  Rng rng (problem.seed);

  for (int restart = 0; restart < problem.restarts; ++restart)
    {
      TreeTopology cur = restart == 0 ? shortest_path_tree (g) : shortest_path_tree (g, nullptr, &rng);
      if (cur.max_hops () > problem.h_max)
        {
          // The SPT minimises every hop count; nothing can do better.
          result.reason = "hop constraint infeasible even for the shortest path tree";
          result.tree = cur;
          result.relay_count = relay_count (cur);
          result.total_hops = cur.total_hops ();
          return result;
        }

      while (relay_count (cur) > problem.n_max)
        {
          std::vector<bool> mask = mask_of (g, cur);
          std::optional<TreeTopology> step;
          for (NodeId v : cur.members ())
            {
              if (cur.is_source (v))
                continue;
              mask[static_cast<std::size_t> (v)] = false;
              try
                {
                  TreeTopology t = shortest_path_tree (g, &mask);
                  if (t.max_hops () <= problem.h_max && (!step || t.total_hops () < step->total_hops ()))
                    step = std::move (t);
                }
              catch (const DisconnectedSource&)
                {
                }
              mask[static_cast<std::size_t> (v)] = true;
            }
          if (!step)
            break;
          cur = std::move (*step);
        }

      if (relay_count (cur) <= problem.n_max)
        {
          ++result.feasible_restarts;
          if (!best_feasible || better (cur, *best_feasible))
            best_feasible = cur;
        }
      else if (!best_effort || relay_count (cur) < relay_count (*best_effort)
               || (relay_count (cur) == relay_count (*best_effort) && better (cur, *best_effort)))
        best_effort = cur;
    }

  result.feasible = best_feasible.has_value ();
  result.tree = result.feasible ? *best_feasible : *best_effort;
  if (!result.feasible)
    result.reason = "no hop-feasible tree within the relay budget was found";
  result.relay_count = relay_count (result.tree);
  result.total_hops = result.tree.total_hops ();
  return result;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t
binomial_capped (std::uint64_t n, std::uint64_t k, std::uint64_t cap)
{
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i)
    {
      // r * (n - k + i) / i stays exact because r is C(n-k+i-1, i-1).
      long double next = static_cast<long double> (r) * (n - k + i) / i;
      if (next > cap)
        return cap + 1;
      r = r * (n - k + i) / i;
    }
  return r;
}

} // namespace

CandidateEnumerator::CandidateEnumerator (const NetworkGraph& graph, int h_max,
                                          const TreeTopology& base, std::uint64_t cap)
  : graph_ (graph), h_max_ (h_max), relays_ (graph.relays ())
{
  max_size_ = std::min<int> (relay_count (base), static_cast<int> (relays_.size ()));
  for (int k = 0; k <= max_size_; ++k)
    {
      total_ += binomial_capped (relays_.size (), static_cast<std::uint64_t> (k), cap);
      if (total_ > cap)
        throw ModelError ("candidate enumeration would visit more than " + std::to_string (cap)
                          + " relay subsets; restrict the relay set");
    }
}

bool
CandidateEnumerator::advance ()
{
  if (!started_)
    {
      started_ = true;
      size_ = 0;
      combo_.clear ();
      return true;
    }
  const int n = static_cast<int> (relays_.size ());
  // Next k-combination in lexicographic order.
  int k = size_;
  int i = k - 1;
  while (i >= 0 && combo_[static_cast<std::size_t> (i)] == n - k + i)
    --i;
  if (i >= 0)
    {
      ++combo_[static_cast<std::size_t> (i)];
      for (int j = i + 1; j < k; ++j)
        combo_[static_cast<std::size_t> (j)] = combo_[static_cast<std::size_t> (j - 1)] + 1;
      return true;
    }
  if (++size_ > max_size_)
    return false;
  combo_.resize (static_cast<std::size_t> (size_));
  for (int j = 0; j < size_; ++j)
    combo_[static_cast<std::size_t> (j)] = j;
  return true;
}

std::optional<TreeTopology>
CandidateEnumerator::next ()
{
  while (!done_)
    {
      if (!advance ())
        {
          done_ = true;
          break;
        }
      ++visited_;
      std::vector<bool> mask (graph_.size (), false);
      for (int idx : combo_)
        mask[static_cast<std::size_t> (relays_[static_cast<std::size_t> (idx)])] = true;
      try
        {
          TreeTopology t = shortest_path_tree (graph_, &mask);
          if (t.max_hops () > h_max_)
            {
              ++hop_violations_;
              continue;
            }
          if (!seen_.insert (t.parents ()).second)
            {
              ++duplicates_;
              continue;
            }
          return t;
        }
      catch (const DisconnectedSource&)
        {
          ++disconnected_;
        }
    }
  return std::nullopt;
}

std::vector<TreeTopology>
enumerate_candidates (const NetworkGraph& graph, int h_max, const TreeTopology& base,
                      std::uint64_t cap)
{
  CandidateEnumerator e (graph, h_max, base, cap);
  std::vector<TreeTopology> out;
  while (auto t = e.next ())
    out.push_back (std::move (*t));
  return out;
}

// ---------------------------------------------------------------------------

std::string
to_string (Layer layer)
{
  return layer == Layer::Detailed ? "detailed" : "simplified";
}

Layer
layer_from_string (const std::string& s)
{
  if (s == "detailed")
    return Layer::Detailed;
  if (s == "simplified")
    return Layer::Simplified;
  throw ModelError ("unknown analysis layer '" + s + "'");
}

SearchPoint
evaluate_rate (const TreeTopology& tree, double rate, double l, const ProtocolParams& params,
               const QosTargets& qos, Layer layer, bool check_delay)
{
  SearchPoint pt;
  pt.rate = rate;
  ArrivalRates rates = ArrivalRates::uniform (tree.sources (), rate);
  std::vector<double> delta;
  std::vector<double> sojourn;
  try
    {
      if (layer == Layer::Detailed)
        {
          DetailedSolution sol = solve_detailed (tree, rates, params, l);
          pt.converged = sol.converged;
          if (sol.saturated)
            pt.note = "saturated";
          for (NodeId v : tree.members ())
            pt.max_delta = std::max (pt.max_delta, sol.at (v).delta);
          if (check_delay && pt.converged && !sol.saturated)
            sojourn = [&] {
              QnaResult q = qna_delay (tree, sol, rates, params);
              std::vector<double> s;
              for (const auto& n : q.nodes)
                s.push_back (n.sojourn);
              return s;
            }();
          pt.ok = pt.converged && !sol.saturated;
        }
      else
        {
          SimplifiedSolution sol = solve_vector (tree, rates, params, l);
          pt.converged = sol.converged;
          for (NodeId v : tree.members ())
            pt.max_delta = std::max (pt.max_delta, sol.delta[static_cast<std::size_t> (v)]);
          if (check_delay && pt.converged)
            sojourn = simplified_delays (tree, sol, params).sojourn;
          pt.ok = pt.converged;
        }
    }
  catch (const UnstableQueue& e)
    {
      pt.ok = false;
      pt.note = e.what ();
      return pt;
    }
  if (!pt.converged && pt.note.empty ())
    pt.note = "no convergence";
  pt.ok = pt.ok && pt.max_delta <= qos.delta_bar;
  if (check_delay && pt.ok)
    {
      for (double s : sojourn)
        pt.max_hop_delay = std::max (pt.max_hop_delay, symbols_to_seconds (s, params));
      pt.ok = pt.max_hop_delay <= qos.d_bar;
    }
  return pt;
}

SearchResult
throughput_search (const TreeTopology& tree, double l, const ProtocolParams& params,
                   const QosTargets& qos, Layer layer, const SearchOptions& options)
{
  if (!(options.first > 0.0) || !(options.step > 0.0))
    throw ModelError ("grid start and step must be positive");
  SearchResult res;
  auto rate_at = [&] (int k) { return k == 0 ? options.first : k * options.step; };

  int k = 0;
  for (; rate_at (k) <= options.max_rate; ++k)
    {
      SearchPoint pt = evaluate_rate (tree, rate_at (k), l, params, qos, layer, options.check_delay);
      res.trace.push_back (pt);
      if (!pt.ok)
        break;
      res.lambda_hat = pt.rate;
    }
  for (int j = 1; j <= options.probe_beyond && rate_at (k + j) <= options.max_rate; ++j)
    {
      SearchPoint pt = evaluate_rate (tree, rate_at (k + j), l, params, qos, layer, options.check_delay);
      res.trace.push_back (pt);
      if (pt.ok)
        ++res.monotonicity_violations;
    }
  return res;
}

std::size_t
select_best (const std::vector<Candidate>& candidates)
{
  if (candidates.empty ())
    throw ModelError ("no candidate trees");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size (); ++i)
    {
      const Candidate& a = candidates[i];
      const Candidate& b = candidates[best];
      if (a.lambda_hat != b.lambda_hat)
        {
          if (a.lambda_hat > b.lambda_hat)
            best = i;
          continue;
        }
      int ra = relay_count (a.tree), rb = relay_count (b.tree);
      if (ra != rb)
        {
          if (ra < rb)
            best = i;
          continue;
        }
      if (a.tree.total_hops () < b.tree.total_hops ())
        best = i;
    }
  return best;
}

DesignReport
make_report (const TreeTopology& tree, const ThroughputBounds& bounds)
{
  DesignReport r;
  r.tree = tree;
  r.relay_count = relay_count (tree);
  r.total_hops = tree.total_hops ();
  r.inner_bound = equal_rate_inner_throughput (tree, bounds);
  return r;
}

} // namespace wsnqos
