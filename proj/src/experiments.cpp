#include "wsnqos/experiments.hpp"

#include "wsnqos/detailed.hpp"
#include "wsnqos/rng.hpp"
#include "wsnqos/simplified.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wsnqos {

namespace {

NetworkGraph
draw_graph (Rng& rng, const ScenarioConfig& cfg)
{
  std::vector<Node> nodes;
  nodes.push_back ({kSinkId, NodeKind::Sink, 0.0, 0.0});
  const int total = cfg.sources + cfg.relays;
  for (int k = 1; k <= total; ++k)
    {
      double x = rng.uniform (0.0, cfg.side);
      double y = rng.uniform (0.0, cfg.side);
      nodes.push_back ({k, k <= cfg.sources ? NodeKind::Source : NodeKind::Relay, x, y});
    }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < nodes.size (); ++i)
    for (std::size_t j = i + 1; j < nodes.size (); ++j)
      if (std::hypot (nodes[i].x - nodes[j].x, nodes[i].y - nodes[j].y) <= cfg.radius)
        edges.push_back ({nodes[i].id, nodes[j].id, cfg.per});
  return NetworkGraph (std::move (nodes), std::move (edges), cfg.per);
}

double
pct_err (double approx, double ref)
{
  if (ref == 0.0)
    return approx == 0.0 ? 0.0 : std::numeric_limits<double>::infinity ();
  return 100.0 * std::abs (approx - ref) / std::abs (ref);
}

} // namespace

Scenario
generate_scenario (std::uint64_t seed, const ScenarioConfig& cfg)
{
  if (cfg.sources < 1 || cfg.relays < 0 || !(cfg.side > 0.0) || !(cfg.radius > 0.0))
    throw ModelError ("invalid scenario configuration");
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt)
    {
      std::uint64_t sub = derive_seed (seed, static_cast<std::uint64_t> (attempt));
      Rng rng (sub);
      Scenario s;
      s.graph = draw_graph (rng, cfg);
      s.seed = seed;
      s.sub_seed = sub;
      s.attempt = attempt;
      s.config = cfg;
      try
        {
          s.tree = shortest_path_tree (s.graph);
          s.connected = true;
        }
      catch (const DisconnectedSource&)
        {
          continue;
        }
      SteinerResult st = steiner_with_budget ({s.graph, cfg.h_max, cfg.n_max, cfg.restarts, sub});
      s.feasible = st.feasible;
      s.tree = st.tree;
      if (s.feasible || !cfg.require_feasible)
        return s;
    }
  throw ModelError ("no acceptable scenario within " + std::to_string (cfg.max_attempts)
                    + " draws");
}

std::vector<Scenario>
generate_scenarios (std::uint64_t seed, int count, const ScenarioConfig& config)
{
  std::vector<Scenario> out;
  for (int k = 0; k < count; ++k)
    out.push_back (generate_scenario (seed + static_cast<std::uint64_t> (k), config));
  return out;
}

double
jain_fairness (const std::vector<double>& x)
{
  if (x.empty ())
    throw ModelError ("fairness index of an empty vector");
  double sum = 0.0, sq = 0.0;
  for (double v : x)
    {
      if (v < 0.0)
        throw ModelError ("fairness index needs nonnegative components");
      sum += v;
      sq += v * v;
    }
  if (sq == 0.0)
    throw ModelError ("fairness index of an all-zero vector");
  return sum * sum / (static_cast<double> (x.size ()) * sq);
}

double
uniqueness_rate (const TreeTopology& tree, const StudyConfig& cfg)
{
  return bound_b1 (cfg.qos.delta_bar, cfg.params) / tree.total_hops ();
}

std::vector<AccuracyRow>
validate_accuracy (const std::vector<Scenario>& scenarios, const StudyConfig& cfg)
{
  std::vector<AccuracyRow> rows;
  for (std::size_t k = 0; k < scenarios.size (); ++k)
    {
      const TreeTopology& tree = scenarios[k].tree;
      AccuracyRow row;
      row.scenario = k;
      row.seed = scenarios[k].seed;
      row.nodes = static_cast<int> (tree.members ().size ());
      row.total_hops = tree.total_hops ();
      row.delta_pct_err = std::numeric_limits<double>::quiet_NaN ();
      double lu = uniqueness_rate (tree, cfg);
      for (double f : cfg.fractions)
        {
          ArrivalRates rates = ArrivalRates::uniform (tree.sources (), f * lu);
          SimplifiedSolution s = solve_vector (tree, rates, cfg.params, cfg.l);
          DetailedSolution d = solve_detailed (tree, rates, cfg.params, cfg.l);
          ++row.points;
          if (!s.converged || !d.converged)
            {
              ++row.unconverged;
              continue;
            }
          SimplifiedDelays sd = simplified_delays (tree, s, cfg.params);
          QnaResult dq = qna_delay (tree, d, rates, cfg.params);

          double max_s = 0.0, max_d = 0.0;
          std::vector<double> ddelta (tree.id_space (), 0.0);
          for (NodeId v : tree.members ())
            {
              auto i = static_cast<std::size_t> (v);
              row.tau_err_pct = std::max (row.tau_err_pct, pct_err (s.tau_minus[i], d.at (v).tau_minus));
              max_s = std::max (max_s, s.delta[i]);
              max_d = std::max (max_d, d.at (v).delta);
              ddelta[i] = d.at (v).delta;
            }
          if (max_d <= 0.002)
            row.delta_abs_err = std::max (row.delta_abs_err, std::abs (max_s - max_d));
          else
            row.delta_pct_err = std::isnan (row.delta_pct_err)
                                  ? pct_err (max_s, max_d)
                                  : std::max (row.delta_pct_err, pct_err (max_s, max_d));

          std::vector<double> dsoj (tree.id_space (), 0.0);
          for (NodeId v : tree.members ())
            dsoj[static_cast<std::size_t> (v)] = dq.nodes[static_cast<std::size_t> (v)].sojourn;
          auto det = end_to_end (tree, ddelta, dsoj);
          for (NodeId src : tree.sources ())
            {
              row.delivery_err_pct = std::max (row.delivery_err_pct,
                                               pct_err (sd.delivery.at (src), det.at (src).delivery));
              row.delay_err_pct = std::max (row.delay_err_pct,
                                            pct_err (sd.end_to_end_delay.at (src), det.at (src).delay));
            }
        }
      rows.push_back (row);
    }
  return rows;
}

std::vector<SlackRow>
validate_slackness (const std::vector<Scenario>& scenarios, const StudyConfig& cfg)
{
  std::vector<SlackRow> rows;
  for (std::size_t k = 0; k < scenarios.size (); ++k)
    {
      const TreeTopology& tree = scenarios[k].tree;
      SlackRow row;
      row.scenario = k;
      row.seed = scenarios[k].seed;
      row.nodes = static_cast<int> (tree.members ().size ());
      row.total_hops = tree.total_hops ();
      row.least_slack_pct = std::numeric_limits<double>::infinity ();
      double lu = uniqueness_rate (tree, cfg);
      for (double f : cfg.fractions)
        {
          ArrivalRates rates = ArrivalRates::uniform (tree.sources (), f * lu);
          Domination d = domination_check (tree, rates, cfg.params, cfg.l, cfg.qos.delta_bar);
          double pct = 100.0 * d.slack;
          row.worst_slack_pct = std::max (row.worst_slack_pct, pct);
          row.least_slack_pct = std::min (row.least_slack_pct, pct);
          row.domination = row.domination && d.tau_bar >= d.max_tau_minus;
          row.monotone = row.monotone && d.monotone_from_top;
        }
      rows.push_back (row);
    }
  return rows;
}

std::vector<double>
default_fairness_rates ()
{
  std::vector<double> r{0.001};
  for (int k = 1; k <= 8; ++k)
    r.push_back (0.5 * k);
  return r;
}

std::vector<FairnessRow>
fairness_study (const std::vector<Scenario>& scenarios, const StudyConfig& cfg,
                const std::vector<double>& rates)
{
  std::vector<FairnessRow> rows;
  for (std::size_t k = 0; k < scenarios.size (); ++k)
    {
      const TreeTopology& tree = scenarios[k].tree;
      FairnessRow row;
      row.scenario = k;
      row.seed = scenarios[k].seed;
      row.nodes = static_cast<int> (tree.members ().size ());
      for (double rate : rates)
        {
          DetailedSolution d = solve_detailed (tree, ArrivalRates::uniform (tree.sources (), rate),
                                               cfg.params, cfg.l);
          std::vector<double> x;
          for (NodeId v : tree.members ())
            x.push_back (d.at (v).tau_minus);
          double j = jain_fairness (x);
          if (j < row.worst_index)
            {
              row.worst_index = j;
              row.worst_rate = rate;
            }
        }
      rows.push_back (row);
    }
  return rows;
}

std::vector<SweepRow>
sensitivity_sweep (const std::string& which, const std::vector<int>& values, const StudyConfig& cfg)
{
  std::vector<SweepRow> rows;
  for (int v : values)
    {
      ProtocolParams p = cfg.params;
      if (which == "n_c")
        p.n_c = v;
      else if (which == "n_t")
        p.n_t = v;
      else if (which == "be_min")
        {
          int span = cfg.params.be_max - cfg.params.be_min;
          p.be_min = v;
          p.be_max = v + span;
        }
      else
        throw ModelError ("unknown sweep parameter '" + which + "' (n_c, n_t, be_min)");
      ThroughputBounds b = compute_bounds (cfg.qos.delta_bar, cfg.qos.d_bar, cfg.l, p);
      rows.push_back ({which, v, b.b1, b.b2, b.b, b.b_prime});
    }
  return rows;
}

PerturbationResult
perturbation_study (const TreeTopology& tree, double lambda_hat, std::uint64_t seed,
                    const StudyConfig& cfg, bool zero_perturbation)
{
  PerturbationResult res;
  res.lambda_hat = lambda_hat;
  Rng rng (seed);
  std::vector<NodeId> order = tree.sources ();
  rng.shuffle (order);
  const std::size_t raised = order.size () / 2;
  std::map<NodeId, double> m;
  for (std::size_t i = 0; i < order.size (); ++i)
    {
      double step = 0.01 * static_cast<double> (1 + rng.below (5));
      if (zero_perturbation)
        step = 0.0;
      double rate = i < raised ? lambda_hat + step : lambda_hat - step;
      m[order[i]] = std::max (0.0, rate);
    }
  double sum = 0.0;
  for (const auto& [id, r] : m)
    {
      res.rates.emplace_back (id, r);
      sum += r;
    }
  res.mean_rate = sum / static_cast<double> (m.size ());

  ArrivalRates rates (m);
  DetailedSolution d = solve_detailed (tree, rates, cfg.params, cfg.l);
  res.converged = d.converged;
  for (NodeId v : tree.members ())
    res.max_delta = std::max (res.max_delta, d.at (v).delta);
  res.discard_ok = res.max_delta <= cfg.qos.delta_bar;
  if (!res.discard_ok)
    res.discard_excess_pct = 100.0 * (res.max_delta - cfg.qos.delta_bar) / cfg.qos.delta_bar;
  try
    {
      QnaResult q = qna_delay (tree, d, rates, cfg.params);
      for (NodeId v : tree.members ())
        res.max_hop_delay = std::max (res.max_hop_delay,
                                      symbols_to_seconds (q.nodes[static_cast<std::size_t> (v)].sojourn,
                                                          cfg.params));
      res.delay_ok = res.max_hop_delay <= cfg.qos.d_bar;
    }
  catch (const UnstableQueue&)
    {
      res.max_hop_delay = std::numeric_limits<double>::infinity ();
      res.delay_ok = false;
    }
  return res;
}

OptimalityRow
optimality_study (const Scenario& scenario, std::size_t index, const StudyConfig& cfg, Layer layer,
                  double step)
{
  OptimalityRow row;
  row.scenario = index;
  row.seed = scenario.seed;
  ThroughputBounds bounds = compute_bounds (cfg.qos.delta_bar, cfg.qos.d_bar, cfg.l, cfg.params);
  TreeTopology spt = shortest_path_tree (scenario.graph);
  row.spt_relays = relay_count (spt);
  row.spt_hops = spt.total_hops ();
  SearchOptions opts;
  opts.step = step;

  row.spt_inner = equal_rate_inner_throughput (spt, bounds);
  SearchResult spt_search = throughput_search (spt, cfg.l, cfg.params, cfg.qos, layer, opts);
  row.spt_searched = spt_search.lambda_hat;
  row.best_searched = row.spt_searched;
  row.monotonicity_violations = spt_search.monotonicity_violations;
  if (row.spt_inner > row.spt_searched)
    ++row.sandwich_violations;
  if (row.spt_searched > 0.0)
    row.min_ratio = row.spt_inner / row.spt_searched;

  CandidateEnumerator e (scenario.graph, scenario.config.h_max, spt);
  while (auto t = e.next ())
    {
      if (*t == spt)
        continue;
      ++row.candidates;
      double inner = equal_rate_inner_throughput (*t, bounds);
      row.best_inner = std::max (row.best_inner, inner);
      if (inner > row.spt_inner)
        ++row.inner_violations;
      SearchResult s = throughput_search (*t, cfg.l, cfg.params, cfg.qos, layer, opts);
      row.best_searched = std::max (row.best_searched, s.lambda_hat);
      row.monotonicity_violations += s.monotonicity_violations;
      if (s.lambda_hat > row.spt_searched)
        ++row.searched_violations;
      if (inner > s.lambda_hat)
        ++row.sandwich_violations;
      if (s.lambda_hat > 0.0)
        row.min_ratio = std::min (row.min_ratio, inner / s.lambda_hat);
    }
  ++row.candidates; // the SPT itself
  return row;
}

} // namespace wsnqos
