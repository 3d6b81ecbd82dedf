#include "wsnqos/model.hpp"

#include <doctest.h>

#include <random>

using namespace wsnqos;

namespace {

// s1 -> s2 -> sink, plus s3 -> sink
TreeTopology
small_tree ()
{
  return TreeTopology ({kNoParent, 2, 0, 0}, {1, 2, 3});
}

NetworkGraph
line_graph (int n_sources, double per = 0.02)
{
  std::vector<Node> nodes{{0, NodeKind::Sink, 0, 0}};
  std::vector<Edge> edges;
  for (int k = 1; k <= n_sources; ++k)
    {
      nodes.push_back ({k, NodeKind::Source, double (k), 0});
      edges.push_back ({k - 1, k, per});
    }
  return NetworkGraph (nodes, edges, per);
}

} // namespace

TEST_SUITE ("core-model")
{
  TEST_CASE ("frame airtime is two symbols per byte")
  {
    ProtocolParams p;
    CHECK (tx_duration (p) == 262.0);
    p.packet_bytes = 1;
    CHECK (tx_duration (p) == 2.0);
    p.packet_bytes = 0;
    CHECK_THROWS_AS (tx_duration (p), ModelError);
  }

  TEST_CASE ("backoff stage means")
  {
    ProtocolParams p;
    CHECK (backoff_stage_means (p) == std::vector<double>{78, 158, 318, 318, 318});
    p.n_c = 1;
    CHECK (backoff_stage_means (p) == std::vector<double>{78});
    p.be_min = p.be_max = 0;
    CHECK (backoff_stage_means (p) == std::vector<double>{8});
  }

  TEST_CASE ("mean backoff and attempt rate")
  {
    ProtocolParams p;
    CHECK (mean_backoff (p, 0.0) == 78.0);
    CHECK (mean_backoff (p, 1.0) == 1190.0);
    CHECK (beta_from_alpha (p, 0.0) == doctest::Approx (1.0 / 78).epsilon (1e-15));
    CHECK (beta_from_alpha (p, 1.0) == doctest::Approx (1.0 / 238).epsilon (1e-15));

    ProtocolParams two;
    two.n_c = 2;
    CHECK (mean_backoff (two, 0.5) == 157.0);
    CHECK (beta_from_alpha (two, 0.5) == doctest::Approx (1.5 / 157));
    CHECK_THROWS_AS (mean_backoff (p, 1.5), ModelError);
  }

  TEST_CASE ("attempt rate is nonincreasing and within its anchors")
  {
    ProtocolParams p;
    double prev = beta_from_alpha (p, 0.0);
    for (int k = 1; k <= 1000; ++k)
      {
        double b = beta_from_alpha (p, k / 1000.0);
        CHECK (b <= prev + 1e-18);
        CHECK (b >= 1.0 / 238 - 1e-15);
        CHECK (b <= 1.0 / 78 + 1e-15);
        prev = b;
      }
  }

  TEST_CASE ("geometric sums")
  {
    CHECK (geometric_sum (0.0, 5) == 1.0);
    CHECK (geometric_sum (1.0, 5) == 5.0);
    CHECK (geometric_sum (0.5, 3) == 1.75);
    CHECK (geometric_sum_derivative (0.5, 3) == 2.0); // 1 + 2a
    CHECK (geometric_sum_derivative (0.3, 1) == 0.0);
  }

  TEST_CASE ("unit round trip")
  {
    ProtocolParams p;
    for (double r : {0.001, 1.0, 3.511, 80.75, 1e4})
      CHECK (per_symbol_to_per_second (per_second_to_per_symbol (r, p), p)
             == doctest::Approx (r).epsilon (1e-12));
    CHECK (symbols_to_seconds (340, p) == doctest::Approx (5.44e-3));
  }

  TEST_CASE ("invalid parameters are rejected")
  {
    ProtocolParams p;
    p.n_c = 0;
    CHECK_THROWS_AS (p.validate (), ModelError);
    p = {};
    p.be_min = 6;
    CHECK_THROWS_AS (p.validate (), ModelError);
  }

  TEST_CASE ("node kind strings")
  {
    for (NodeKind k : {NodeKind::Source, NodeKind::Relay, NodeKind::Sink})
      CHECK (node_kind_from_string (to_string (k)) == k);
    CHECK_THROWS_AS (node_kind_from_string ("router"), ModelError);
  }

  TEST_CASE ("graph validation")
  {
    std::vector<Node> nodes{{0, NodeKind::Sink, 0, 0}, {1, NodeKind::Source, 1, 0}};
    CHECK_NOTHROW (NetworkGraph (nodes, {{0, 1, 0.01}}, 0.02));
    CHECK_THROWS_AS (NetworkGraph (nodes, {{0, 1, 0.05}}, 0.02), ModelError);
    CHECK_THROWS_AS (NetworkGraph (nodes, {{0, 1, 0.01}, {1, 0, 0.01}}, 0.02), ModelError);
    CHECK_THROWS_AS (NetworkGraph (nodes, {{1, 1, 0.01}}, 0.02), ModelError);
    std::vector<Node> two_sinks{{0, NodeKind::Sink, 0, 0}, {1, NodeKind::Sink, 1, 0}};
    CHECK_THROWS_AS (NetworkGraph (two_sinks, {}, 0.02), ModelError);

    NetworkGraph g (nodes, {{0, 1, 0.01}}, 0.02);
    CHECK (g.has_edge (1, 0));
    CHECK (*g.edge_per (0, 1) == 0.01);
    CHECK (g.sources () == std::vector<NodeId>{1});
    CHECK (g.relays ().empty ());
  }

  TEST_CASE ("tree structure")
  {
    TreeTopology t = small_tree ();
    CHECK (t.members () == std::vector<NodeId>{1, 2, 3});
    CHECK (t.path (1) == std::vector<NodeId>{1, 2});
    CHECK (t.hops (1) == 2);
    CHECK (t.total_hops () == 4);
    CHECK (t.max_hops () == 2);
    CHECK (t.sources_through (2) == 2);
    CHECK (t.sources_through (0) == 0);
    CHECK (t.on_path (1, 2));
    CHECK_FALSE (t.on_path (3, 2));
    CHECK (t.children (2) == std::vector<NodeId>{1});
    CHECK (t.leaves_first ().front () == 1);
    CHECK (relay_count (t) == 0);
  }

  TEST_CASE ("tree rejects cycles, disconnected sources and idle members")
  {
    CHECK_THROWS_AS (TreeTopology ({kNoParent, 2, 1}, {1}), ModelError);
    CHECK_THROWS_AS (TreeTopology ({kNoParent, kNoParent, 0}, {1, 2}), ModelError);
    CHECK_THROWS_AS (TreeTopology ({kNoParent, 0, 0}, {1}), ModelError);
    CHECK_THROWS_AS (TreeTopology ({3, 0}, {1}), ModelError);
  }

  TEST_CASE ("double counting: total hops equals the sum of through-counts")
  {
    std::mt19937_64 rng (5);
    for (int trial = 0; trial < 200; ++trial)
      {
        int n = 2 + static_cast<int> (rng () % 20);
        std::vector<NodeId> parent (static_cast<std::size_t> (n), kNoParent);
        for (int v = 1; v < n; ++v)
          parent[static_cast<std::size_t> (v)] = static_cast<NodeId> (rng () % static_cast<unsigned> (v));
        // Every leaf must be a source so no member is idle.
        std::vector<bool> has_child (static_cast<std::size_t> (n), false);
        for (int v = 1; v < n; ++v)
          has_child[static_cast<std::size_t> (parent[static_cast<std::size_t> (v)])] = true;
        std::vector<NodeId> sources;
        for (int v = 1; v < n; ++v)
          if (!has_child[static_cast<std::size_t> (v)] || rng () % 2)
            sources.push_back (v);
        TreeTopology t (parent, sources);
        int sum = 0;
        for (NodeId v : t.members ())
          sum += t.sources_through (v);
        CHECK (sum == t.total_hops ());
      }
  }

  TEST_CASE ("node loads aggregate along paths")
  {
    TreeTopology t = small_tree ();
    auto zero = node_loads (t, ArrivalRates::uniform (t.sources (), 0.0));
    for (double v : zero)
      CHECK (v == 0.0);
    ArrivalRates r ({{1, 1.0}, {2, 1.0}, {3, 0.5}});
    auto nu = node_loads (t, r);
    CHECK (nu[1] == 1.0);
    CHECK (nu[2] == 2.0);
    CHECK (nu[3] == 0.5);
    CHECK (r.total_load (t) == 1.0 * 2 + 1.0 + 0.5);
    CHECK_THROWS_AS (node_loads (t, ArrivalRates ({{1, 1.0}})), ModelError);

    // star of m sources
    TreeTopology star ({kNoParent, 0, 0, 0, 0}, {1, 2, 3, 4});
    auto s = node_loads (star, ArrivalRates::uniform (star.sources (), 2.0));
    double total = 0;
    for (double v : s)
      total += v;
    CHECK (total == 8.0);
  }

  TEST_CASE ("arrival rates")
  {
    CHECK_THROWS_AS (ArrivalRates ({{1, -1.0}}), ModelError);
    ArrivalRates r ({{1, 62.5}});
    ProtocolParams p;
    CHECK (r.per_symbol (1, p) == doctest::Approx (1e-3));
    CHECK (r.per_symbol (2, p) == 0.0);
  }

  TEST_CASE ("tree validation against a graph")
  {
    NetworkGraph g = line_graph (6);
    std::vector<NodeId> parent{kNoParent, 0, 1, 2, 3, 4, 5};
    TreeTopology chain (parent, {1, 2, 3, 4, 5, 6});
    CHECK (validate_tree (chain, g, 6));
    TreeVerdict v = validate_tree (chain, g, 5);
    CHECK_FALSE (v);
    REQUIRE (v.node.has_value ());
    CHECK (*v.node == 6);

    TreeTopology shortcut ({kNoParent, 0, 0, 2, 3, 4, 5}, {1, 2, 3, 4, 5, 6});
    TreeVerdict bad = validate_tree (shortcut, g, 6);
    CHECK_FALSE (bad);
    CHECK (*bad.node == 2);
  }
}
