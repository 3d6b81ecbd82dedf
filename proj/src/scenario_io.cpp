#include "wsnqos/scenario_io.hpp"

#include "wsnqos/report.hpp"

#include <cmath>
#include <fstream>

namespace wsnqos {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json
num (double v)
{
  if (!std::isfinite (v))
    return nullptr;
  return v;
}

template <typename T>
T
require (const json& j, const char* key)
{
  if (!j.contains (key))
    throw ModelError (std::string ("missing field '") + key + "'");
  try
    {
      return j.at (key).get<T> ();
    }
  catch (const json::exception& e)
    {
      throw ModelError (std::string ("bad field '") + key + "': " + e.what ());
    }
}

} // namespace

ordered_json
tree_to_json (const TreeTopology& tree)
{
  return {{"parent", tree.parents ()}};
}

TreeTopology
tree_from_json (const json& j, const NetworkGraph& graph)
{
  auto parent = require<std::vector<NodeId>> (j, "parent");
  if (parent.size () != graph.size ())
    throw ModelError ("tree parent array must have one entry per node");
  return TreeTopology (std::move (parent), graph.sources ());
}

ordered_json
scenario_to_json (const ScenarioFile& s)
{
  ordered_json j;
  j["format"] = kScenarioFormat;
  if (s.seed)
    j["seed"] = *s.seed;
  ordered_json nodes = ordered_json::array ();
  for (const Node& n : s.graph.nodes ())
    nodes.push_back ({{"id", n.id}, {"kind", to_string (n.kind)}, {"x", n.x}, {"y", n.y}});
  j["nodes"] = nodes;
  ordered_json edges = ordered_json::array ();
  for (const Edge& e : s.graph.edges ())
    edges.push_back ({{"a", e.a}, {"b", e.b}, {"per", e.per}});
  j["edges"] = edges;
  j["l"] = s.l;
  j["params"] = params_to_json (s.params);
  j["qos"] = qos_to_json (s.qos);
  if (s.tree)
    j["tree"] = tree_to_json (*s.tree);
  if (s.rates)
    {
      ordered_json r = ordered_json::object ();
      for (const auto& [id, v] : s.rates->per_second ())
        r[std::to_string (id)] = v;
      j["rates"] = r;
    }
  return j;
}

ScenarioFile
scenario_from_json (const json& j)
{
  if (!j.is_object ())
    throw ModelError ("scenario must be a JSON object");
  int format = require<int> (j, "format");
  if (format != kScenarioFormat)
    throw ModelError ("unsupported scenario format " + std::to_string (format));

  ScenarioFile s;
  if (j.contains ("seed"))
    s.seed = require<std::uint64_t> (j, "seed");
  s.l = j.value ("l", s.l);

  std::vector<Node> nodes;
  for (const auto& n : require<json> (j, "nodes"))
    nodes.push_back ({require<int> (n, "id"), node_kind_from_string (require<std::string> (n, "kind")),
                      n.value ("x", 0.0), n.value ("y", 0.0)});
  std::vector<Edge> edges;
  for (const auto& e : require<json> (j, "edges"))
    edges.push_back ({require<int> (e, "a"), require<int> (e, "b"), require<double> (e, "per")});
  s.graph = NetworkGraph (std::move (nodes), std::move (edges), s.l);

  if (j.contains ("params"))
    s.params = params_from_json (j.at ("params"));
  if (j.contains ("qos"))
    {
      const json& q = j.at ("qos");
      QosTargets t = split_qos (q.value ("p_del", 0.9), q.value ("d_max", 0.1), q.value ("h_max", 5));
      if (q.contains ("delta_bar"))
        t.delta_bar = require<double> (q, "delta_bar");
      if (q.contains ("d_bar"))
        t.d_bar = require<double> (q, "d_bar");
      s.qos = t;
    }
  if (j.contains ("tree"))
    s.tree = tree_from_json (j.at ("tree"), s.graph);
  if (j.contains ("rates"))
    {
      std::map<NodeId, double> m;
      for (const auto& [k, v] : j.at ("rates").items ())
        m[std::stoi (k)] = v.get<double> ();
      s.rates = ArrivalRates (std::move (m));
    }
  return s;
}

ScenarioFile
load_scenario (const std::string& path)
{
  std::ifstream f (path);
  if (!f)
    throw ModelError ("cannot open scenario '" + path + "'");
  json j;
  try
    {
      f >> j;
    }
  catch (const json::parse_error& e)
    {
      throw ModelError ("scenario '" + path + "' is not valid JSON: " + e.what ());
    }
  return scenario_from_json (j);
}

ordered_json
detailed_report (const TreeTopology& tree, const DetailedSolution& sol, const QnaResult* qna,
                 const ProtocolParams& params)
{
  ordered_json j;
  j["analysis"] = "detailed";
  j["convergence"] = {{"converged", sol.converged},
                      {"iterations", sol.iterations},
                      {"residual", num (sol.residual)},
                      {"saturated", sol.saturated},
                      {"saturated_nodes", sol.saturated_nodes}};
  ordered_json nodes = ordered_json::array ();
  for (NodeId v : tree.members ())
    {
      const DetailedNodeState& s = sol.at (v);
      ordered_json n{{"id", v},
                     {"beta", num (s.beta)},
                     {"alpha", num (s.alpha)},
                     {"eta", num (s.eta)},
                     {"c", num (s.c)},
                     {"tau", num (s.tau_perceived)},
                     {"tau_minus", num (s.tau_minus)},
                     {"b", num (s.b)},
                     {"q", num (s.q)},
                     {"p", num (s.p)},
                     {"gamma", num (s.gamma)},
                     {"r", num (s.r)},
                     {"service_time", num (symbols_to_seconds (s.sigma_inv, params))},
                     {"delta", num (s.delta)},
                     {"nu", num (per_symbol_to_per_second (s.nu, params))},
                     {"theta", num (per_symbol_to_per_second (s.theta, params))}};
      if (qna)
        {
          const QnaNodeState& q = qna->nodes[static_cast<std::size_t> (v)];
          n["qna"] = {{"es", num (symbols_to_seconds (q.es, params))},
                      {"cs2", num (q.cs2)},
                      {"ca2", num (q.ca2)},
                      {"cd2", num (q.cd2)},
                      {"rho", num (q.rho)},
                      {"sojourn", num (symbols_to_seconds (q.sojourn, params))}};
        }
      nodes.push_back (n);
    }
  j["nodes"] = nodes;

  std::vector<double> delta (tree.id_space (), 0.0), soj (tree.id_space (), 0.0);
  for (NodeId v : tree.members ())
    {
      delta[static_cast<std::size_t> (v)] = sol.at (v).delta;
      if (qna)
        soj[static_cast<std::size_t> (v)] = qna->nodes[static_cast<std::size_t> (v)].sojourn;
    }
  ordered_json src = ordered_json::array ();
  for (const auto& [id, e] : end_to_end (tree, delta, soj))
    {
      ordered_json r{{"source", id}, {"hops", tree.hops (id)}, {"delivery", num (e.delivery)}};
      if (qna)
        r["delay"] = num (symbols_to_seconds (e.delay, params));
      src.push_back (r);
    }
  j["sources"] = src;
  return j;
}

ordered_json
simplified_report (const TreeTopology& tree, const SimplifiedSolution& sol,
                   const SimplifiedDelays* delays, const ProtocolParams& params)
{
  ordered_json j;
  j["analysis"] = "simplified";
  j["convergence"] = {{"converged", sol.converged},
                      {"iterations", sol.iterations},
                      {"residual", num (sol.residual)},
                      {"unique", sol.unique},
                      {"contraction_constant", num (sol.contraction_constant)}};
  ordered_json nodes = ordered_json::array ();
  for (NodeId v : tree.members ())
    {
      auto i = static_cast<std::size_t> (v);
      ordered_json n{{"id", v},
                     {"nu", num (per_symbol_to_per_second (sol.nu[i], params))},
                     {"tau_minus", num (sol.tau_minus[i])},
                     {"alpha", num (sol.alpha[i])},
                     {"beta", num (sol.beta[i])},
                     {"gamma", num (sol.gamma[i])},
                     {"delta", num (sol.delta[i])}};
      if (delays)
        {
          n["rho"] = num (delays->rho[i]);
          n["sojourn"] = num (symbols_to_seconds (delays->sojourn[i], params));
        }
      nodes.push_back (n);
    }
  j["nodes"] = nodes;
  ordered_json src = ordered_json::array ();
  for (NodeId s : tree.sources ())
    {
      ordered_json r{{"source", s}, {"hops", tree.hops (s)}};
      if (delays)
        {
          r["delivery"] = num (delays->delivery.at (s));
          r["delay"] = num (symbols_to_seconds (delays->end_to_end_delay.at (s), params));
        }
      else
        {
          double d = 1.0;
          for (NodeId v : tree.path (s))
            d *= 1.0 - sol.delta[static_cast<std::size_t> (v)];
          r["delivery"] = num (d);
        }
      src.push_back (r);
    }
  j["sources"] = src;
  return j;
}

ordered_json
bounds_to_json (const ThroughputBounds& b)
{
  return {{"delta_bar", num (b.delta_bar)},
          {"d_bar", num (b.d_bar)},
          {"alpha_max", num (b.alpha_max)},
          {"a", num (b.a)},
          {"tau_max", num (b.tau_max)},
          {"tau_capped", b.tau_capped},
          {"b1", num (b.b1)},
          {"b2", num (b.b2)},
          {"b", num (b.b)},
          {"b_prime", num (b.b_prime)},
          {"delay_feasible", b.delay_feasible},
          {"s_bar", num (b.s_bar)},
          {"cs2_bar", num (b.cs2_bar)}};
}

} // namespace wsnqos
