// Command-line front end: scenario generation, analysis, bounds, design and
// the validation / sensitivity studies.

#include "wsnqos/bounds.hpp"
#include "wsnqos/designer.hpp"
#include "wsnqos/detailed.hpp"
#include "wsnqos/experiments.hpp"
#include "wsnqos/report.hpp"
#include "wsnqos/scenario_io.hpp"
#include "wsnqos/simplified.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

using namespace wsnqos;

namespace {

struct Global
{
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string out = "-";
};

struct ScenarioFlags
{
  ScenarioConfig cfg;
  bool allow_infeasible = false;
  int count = 5;

  void add (CLI::App* app, bool with_count)
  {
    app->add_option ("--sources", cfg.sources, "Number of sources")->check (CLI::PositiveNumber);
    app->add_option ("--relays", cfg.relays, "Candidate relay count")->check (CLI::NonNegativeNumber);
    app->add_option ("--side", cfg.side, "Square side, meters")->check (CLI::PositiveNumber);
    app->add_option ("--radius", cfg.radius, "Link range, meters")->check (CLI::PositiveNumber);
    app->add_option ("--per", cfg.per, "Per-link packet error rate")->check (CLI::Range (0.0, 0.999));
    app->add_option ("--h-max", cfg.h_max, "Hop bound")->check (CLI::PositiveNumber);
    app->add_option ("--n-max", cfg.n_max, "Relay budget")->check (CLI::NonNegativeNumber);
    app->add_option ("--restarts", cfg.restarts, "Steiner restarts")->check (CLI::PositiveNumber);
    app->add_flag ("--allow-infeasible", allow_infeasible,
                   "Accept instances without a budget-feasible tree");
    if (with_count)
      app->add_option ("--scenarios", count, "Number of scenarios")->check (CLI::PositiveNumber);
  }

  ScenarioConfig config () const
  {
    ScenarioConfig c = cfg;
    c.require_feasible = !allow_infeasible;
    return c;
  }
};

struct ProtocolFlags
{
  ProtocolParams params;
  double l = 0.02;
  std::optional<double> delta_bar;
  std::optional<double> d_bar;
  double p_del = 0.9;
  double d_max = 0.1;
  int h_max = 5;

  void add (CLI::App* app)
  {
    app->add_option ("--nc", params.n_c, "CCA failures before discard")->check (CLI::PositiveNumber);
    app->add_option ("--nt", params.n_t, "Transmission failures before discard")
      ->check (CLI::PositiveNumber);
    app->add_option ("--be-min", params.be_min, "Minimum backoff exponent");
    app->add_option ("--be-max", params.be_max, "Maximum backoff exponent");
    app->add_option ("--packet-bytes", params.packet_bytes, "Frame length, bytes")
      ->check (CLI::PositiveNumber);
    app->add_option ("--l", l, "Worst-case link packet error rate")->check (CLI::Range (0.0, 0.999));
    app->add_option ("--delta-bar", delta_bar, "Per-link discard target")
      ->check (CLI::Range (0.0, 1.0));
    app->add_option ("--d-bar", d_bar, "Per-link mean delay target, seconds")
      ->check (CLI::PositiveNumber);
    app->add_option ("--p-del", p_del, "End-to-end delivery target")->check (CLI::Range (0.0, 1.0));
    app->add_option ("--d-max", d_max, "End-to-end mean delay target, seconds")
      ->check (CLI::PositiveNumber);
    app->add_option ("--qos-h-max", h_max, "Hop count used to split end-to-end targets")
      ->check (CLI::PositiveNumber);
  }

  QosTargets qos () const
  {
    QosTargets q = split_qos (p_del, d_max, h_max);
    if (delta_bar)
      q.delta_bar = *delta_bar;
    if (d_bar)
      q.d_bar = *d_bar;
    return q;
  }

  StudyConfig study () const
  {
    StudyConfig s;
    s.params = params;
    s.params.validate ();
    s.l = l;
    s.qos = qos ();
    return s;
  }
};

int
finish (const ExperimentReport& report, const Global& g)
{
  emit (report, format_from_string (g.format), g.out);
  for (const auto& [name, ok] : report.invariants)
    if (!ok)
      std::cerr << "invariant failed: " << name << "\n";
  return report.all_hold () ? 0 : 1;
}

ExperimentReport
new_report (const std::string& kind, const Global& g, const StudyConfig& s)
{
  ExperimentReport r;
  r.kind = kind;
  r.provenance = make_provenance (g.seed, s.params, s.l, s.qos);
  return r;
}

// Seed recorded in a scenario file; empty when the file has none.
Cell
scenario_seed_cell (const ScenarioFile& f)
{
  if (f.seed)
    return static_cast<std::int64_t> (*f.seed);
  return std::string ();
}

// Scenario from a file, or a freshly generated one.
ScenarioFile
scenario_input (const std::string& path, const Global& g, const ScenarioFlags& sf,
                const ProtocolFlags& pf)
{
  if (!path.empty ())
    return load_scenario (path);
  Scenario s = generate_scenario (g.seed, sf.config ());
  ScenarioFile f;
  f.graph = s.graph;
  f.params = pf.params;
  f.l = pf.l;
  f.qos = pf.qos ();
  f.tree = s.tree;
  f.seed = g.seed;
  return f;
}

// ---------------------------------------------------------------------------

int
cmd_scenario_gen (const Global& g, const ScenarioFlags& sf, const ProtocolFlags& pf)
{
  Scenario s = generate_scenario (g.seed, sf.config ());
  ScenarioFile f;
  f.graph = s.graph;
  f.params = pf.params;
  f.l = sf.cfg.per;
  f.qos = pf.qos ();
  f.tree = s.tree;
  f.seed = g.seed;

  if (g.format == "json")
    {
      nlohmann::ordered_json j = scenario_to_json (f);
      j["generation"] = {{"sub_seed", s.sub_seed},
                         {"attempt", s.attempt},
                         {"connected", s.connected},
                         {"feasible", s.feasible},
                         {"relays_used", relay_count (s.tree)},
                         {"total_hops", s.tree.total_hops ()}};
      write_text (j.dump (2) + "\n", g.out);
      return s.connected && (s.feasible || sf.allow_infeasible) ? 0 : 1;
    }
  StudyConfig st = pf.study ();
  st.l = sf.cfg.per;
  ExperimentReport r = new_report ("scenario", g, st);
  Table nodes{"nodes", {"id", "kind", "x", "y", "parent"}, {}};
  for (const Node& n : s.graph.nodes ())
    nodes.add_row ({std::int64_t{n.id}, to_string (n.kind), n.x, n.y,
                    std::int64_t{s.tree.parent (n.id)}});
  Table edges{"edges", {"a", "b", "per"}, {}};
  for (const Edge& e : s.graph.edges ())
    edges.add_row ({std::int64_t{e.a}, std::int64_t{e.b}, e.per});
  r.tables = {nodes, edges};
  r.check ("connected", s.connected);
  r.check ("budget_feasible", s.feasible || sf.allow_infeasible);
  return finish (r, g);
}

int
cmd_analyze (const Global& g, const std::string& path, const std::string& layer,
             std::optional<double> rate, const std::string& tree_mode, const ScenarioFlags& sf,
             const ProtocolFlags& pf)
{
  ScenarioFile f = scenario_input (path, g, sf, pf);
  TreeTopology tree;
  if (tree_mode == "spt")
    tree = shortest_path_tree (f.graph);
  else if (f.tree)
    tree = *f.tree;
  else
    tree = shortest_path_tree (f.graph);

  ArrivalRates rates;
  if (rate)
    rates = ArrivalRates::uniform (tree.sources (), *rate);
  else if (f.rates)
    rates = *f.rates;
  else
    throw ModelError ("no arrival rates: pass --rate or include \"rates\" in the scenario");

  StudyConfig st;
  st.params = f.params;
  st.l = f.l;
  st.qos = f.qos;
  ExperimentReport r = new_report ("analysis", g, st);
  nlohmann::ordered_json extra;
  extra["tree"] = tree_to_json (tree);
  extra["total_load"] = rates.total_load (tree);

  Table nodes{"nodes",
              {"layer", "id", "nu", "tau_minus", "alpha", "gamma", "delta", "sojourn"},
              {}};
  bool all_ok = true;
  if (layer == "detailed" || layer == "both")
    {
      DetailedSolution d = solve_detailed (tree, rates, f.params, f.l);
      std::optional<QnaResult> q;
      try
        {
          q = qna_delay (tree, d, rates, f.params);
        }
      catch (const UnstableQueue& e)
        {
          std::cerr << e.what () << "\n";
        }
      extra["detailed"] = detailed_report (tree, d, q ? &*q : nullptr, f.params);
      for (NodeId v : tree.members ())
        {
          const auto& s = d.at (v);
          double soj = q ? symbols_to_seconds (q->nodes[static_cast<std::size_t> (v)].sojourn, f.params)
                         : std::nan ("");
          nodes.add_row ({std::string ("detailed"), std::int64_t{v},
                          per_symbol_to_per_second (s.nu, f.params), s.tau_minus, s.alpha, s.gamma,
                          s.delta, soj});
        }
      r.check ("detailed_converged", d.converged);
      r.check ("detailed_stable", q.has_value () && !d.saturated);
      all_ok = all_ok && d.converged;
    }
  if (layer == "simplified" || layer == "both")
    {
      VectorOptions vo;
      vo.delta_bar = f.qos.delta_bar;
      SimplifiedSolution s = solve_vector (tree, rates, f.params, f.l, vo);
      std::optional<SimplifiedDelays> sd;
      try
        {
          sd = simplified_delays (tree, s, f.params);
        }
      catch (const UnstableQueue& e)
        {
          std::cerr << e.what () << "\n";
        }
      extra["simplified"] = simplified_report (tree, s, sd ? &*sd : nullptr, f.params);
      for (NodeId v : tree.members ())
        {
          auto i = static_cast<std::size_t> (v);
          double soj = sd ? symbols_to_seconds (sd->sojourn[i], f.params) : std::nan ("");
          nodes.add_row ({std::string ("simplified"), std::int64_t{v},
                          per_symbol_to_per_second (s.nu[i], f.params), s.tau_minus[i], s.alpha[i],
                          s.gamma[i], s.delta[i], soj});
        }
      r.check ("simplified_converged", s.converged);
      r.check ("simplified_stable", sd.has_value ());
    }
  if (layer != "detailed" && layer != "simplified" && layer != "both")
    throw ModelError ("unknown layer '" + layer + "'");
  r.tables.push_back (nodes);
  r.extra = extra;
  return finish (r, g);
}

int
cmd_bounds (const Global& g, const ProtocolFlags& pf, bool human)
{
  StudyConfig st = pf.study ();
  ThroughputBounds b = compute_bounds (st.qos.delta_bar, st.qos.d_bar, st.l, st.params);
  if (human)
    {
      std::ostringstream o;
      char buf[128];
      auto line = [&] (const char* name, double v, const char* unit) {
        std::snprintf (buf, sizeof buf, "%-10s %14.6g  %s\n", name, v, unit);
        o << buf;
      };
      line ("delta_bar", b.delta_bar, "");
      line ("d_bar", b.d_bar * 1e3, "ms");
      line ("alpha_max", b.alpha_max, "");
      line ("a", b.a, "per symbol");
      line ("tau_max", b.tau_max, "per symbol");
      line ("B1", b.b1, "pkts/s");
      line ("B2", b.b2, "pkts/s");
      line ("B", b.b, "pkts/s");
      line ("B'", b.b_prime, b.delay_feasible ? "pkts/s" : "pkts/s (delay target infeasible)");
      write_text (o.str (), g.out);
      return b.delay_feasible ? 0 : 1;
    }
  ExperimentReport r = new_report ("bounds", g, st);
  Table t{"bounds", {"delta_bar", "d_bar", "alpha_max", "a", "tau_max", "b1", "b2", "b", "b_prime"}, {}};
  t.add_row ({b.delta_bar, b.d_bar, b.alpha_max, b.a, b.tau_max, b.b1, b.b2, b.b, b.b_prime});
  r.tables.push_back (t);
  r.extra["bounds"] = bounds_to_json (b);
  r.check ("b_is_min", b.b == std::min (b.b1, b.b2));
  r.check ("tau_max_within_a", b.tau_max <= b.a);
  r.check ("delay_feasible", b.delay_feasible);
  return finish (r, g);
}

int
cmd_design (const Global& g, const std::string& path, const std::string& mode, int h_max, int n_max,
            int restarts, const std::string& layer_name, double step, bool search, bool check_delay,
            const ScenarioFlags& sf, const ProtocolFlags& pf)
{
  ScenarioFile f = scenario_input (path, g, sf, pf);
  StudyConfig st;
  st.params = f.params;
  st.l = f.l;
  st.qos = f.qos;
  ThroughputBounds bounds = compute_bounds (st.qos.delta_bar, st.qos.d_bar, st.l, st.params);
  Layer layer = layer_from_string (layer_name);
  SearchOptions so;
  so.step = step;
  so.check_delay = check_delay;

  ExperimentReport r = new_report ("design", g, st);
  Table t{"design",
          {"mode", "tree_index", "relays", "total_hops", "max_hops", "inner_bound", "searched",
           "monotonicity_violations", "seed", "scenario_seed", "param_digest"},
          {}};
  std::vector<Candidate> cands;
  std::vector<DesignReport> reports;
  auto add = [&] (const TreeTopology& tree) {
    DesignReport dr = make_report (tree, bounds);
    int mono = 0;
    if (search)
      {
        SearchResult s = throughput_search (tree, st.l, st.params, st.qos, layer, so);
        dr.searched_throughput = s.lambda_hat;
        dr.trace = s.trace;
        mono = s.monotonicity_violations;
      }
    cands.push_back ({tree, dr.searched_throughput.value_or (dr.inner_bound)});
    t.add_row ({mode, static_cast<std::int64_t> (reports.size ()), std::int64_t{dr.relay_count},
                std::int64_t{dr.total_hops}, std::int64_t{tree.max_hops ()}, dr.inner_bound,
                dr.searched_throughput ? Cell{*dr.searched_throughput} : Cell{std::nan ("")},
                std::int64_t{mono}, static_cast<std::int64_t> (g.seed), scenario_seed_cell (f),
                r.provenance.param_digest});
    r.check ("sandwich_tree_" + std::to_string (reports.size ()),
             !dr.searched_throughput || dr.inner_bound <= *dr.searched_throughput);
    reports.push_back (dr);
  };

  bool feasible = true;
  if (mode == "spt")
    {
      TreeTopology spt = shortest_path_tree (f.graph);
      feasible = spt.max_hops () <= h_max;
      add (spt);
    }
  else if (mode == "steiner")
    {
      SteinerResult s = steiner_with_budget ({f.graph, h_max, n_max, restarts, g.seed});
      feasible = s.feasible;
      if (!s.feasible)
        std::cerr << s.reason << "\n";
      add (s.tree);
    }
  else if (mode == "enumerate")
    {
      TreeTopology spt = shortest_path_tree (f.graph);
      add (spt);
      CandidateEnumerator e (f.graph, h_max, spt);
      while (auto c = e.next ())
        if (!(*c == spt))
          add (*c);
      r.extra["enumeration"] = {{"subsets", e.subset_count ()},
                                {"disconnected", e.disconnected ()},
                                {"hop_violations", e.hop_violations ()},
                                {"duplicates", e.duplicates ()}};
    }
  else
    throw ModelError ("unknown design mode '" + mode + "' (spt, steiner, enumerate)");

  r.check ("feasible", feasible);
  std::size_t best = select_best (cands);
  nlohmann::ordered_json chosen;
  const DesignReport& br = reports[best];
  chosen["index"] = best;
  chosen["tree"] = tree_to_json (br.tree);
  chosen["relay_count"] = br.relay_count;
  chosen["total_hops"] = br.total_hops;
  chosen["inner_bound"] = br.inner_bound;
  if (br.searched_throughput)
    chosen["searched_throughput"] = *br.searched_throughput;
  nlohmann::ordered_json trace = nlohmann::ordered_json::array ();
  for (const SearchPoint& p : br.trace)
    trace.push_back ({{"rate", p.rate},
                      {"ok", p.ok},
                      {"converged", p.converged},
                      {"max_delta", p.max_delta},
                      {"max_hop_delay", p.max_hop_delay},
                      {"note", p.note}});
  chosen["qos_trace"] = trace;
  r.extra["best"] = chosen;
  r.extra["bounds"] = bounds_to_json (bounds);
  r.tables.push_back (t);
  return finish (r, g);
}

std::vector<double>
parse_list (const std::string& s)
{
  std::vector<double> out;
  std::stringstream ss (s);
  std::string item;
  while (std::getline (ss, item, ','))
    out.push_back (std::stod (item));
  if (out.empty ())
    throw ModelError ("empty list '" + s + "'");
  return out;
}

int
cmd_validate (const Global& g, const std::string& which, const ScenarioFlags& sf,
              const ProtocolFlags& pf, const std::string& fractions, double max_tau_err,
              double max_delivery_err, double max_delay_err, double max_slack, double min_jain)
{
  StudyConfig st = pf.study ();
  st.l = sf.cfg.per;
  if (!fractions.empty ())
    st.fractions = parse_list (fractions);
  std::vector<Scenario> sc = generate_scenarios (g.seed, sf.count, sf.config ());
  ExperimentReport r = new_report ("validate-" + which, g, st);
  const std::string digest = r.provenance.param_digest;

  if (which == "accuracy")
    {
      Table t{"accuracy",
              {"scenario", "seed", "param_digest", "nodes", "total_hops", "tau_err_pct",
               "max_delta_abs_err", "max_delta_pct_err", "delivery_err_pct", "delay_err_pct",
               "unconverged"},
              {}};
      double tau = 0, del = 0, dly = 0;
      int unconv = 0;
      for (const AccuracyRow& a : validate_accuracy (sc, st))
        {
          t.add_row ({static_cast<std::int64_t> (a.scenario), static_cast<std::int64_t> (a.seed),
                      digest, std::int64_t{a.nodes}, std::int64_t{a.total_hops}, a.tau_err_pct,
                      a.delta_abs_err, a.delta_pct_err, a.delivery_err_pct, a.delay_err_pct,
                      std::int64_t{a.unconverged}});
          tau = std::max (tau, a.tau_err_pct);
          del = std::max (del, a.delivery_err_pct);
          dly = std::max (dly, a.delay_err_pct);
          unconv += a.unconverged;
        }
      r.tables.push_back (t);
      r.check ("all_converged", unconv == 0);
      r.check ("tau_error_within_bound", tau <= max_tau_err);
      r.check ("delivery_error_within_bound", del <= max_delivery_err);
      r.check ("delay_error_within_bound", dly <= max_delay_err);
    }
  else if (which == "slackness")
    {
      Table t{"slackness",
              {"scenario", "seed", "param_digest", "nodes", "total_hops", "worst_slack_pct",
               "least_slack_pct", "inverse_total_hops_pct", "domination", "monotone"},
              {}};
      bool dom = true, mono = true;
      double worst = 0;
      for (const SlackRow& s : validate_slackness (sc, st))
        {
          t.add_row ({static_cast<std::int64_t> (s.scenario), static_cast<std::int64_t> (s.seed),
                      digest, std::int64_t{s.nodes}, std::int64_t{s.total_hops}, s.worst_slack_pct,
                      s.least_slack_pct, 100.0 / s.total_hops, s.domination, s.monotone});
          dom = dom && s.domination;
          mono = mono && s.monotone;
          worst = std::max (worst, s.worst_slack_pct);
        }
      r.tables.push_back (t);
      r.check ("domination", dom);
      r.check ("monotone_from_top", mono);
      r.check ("slack_within_bound", worst <= max_slack);
    }
  else if (which == "fairness")
    {
      Table t{"fairness", {"scenario", "seed", "param_digest", "nodes", "worst_index", "worst_rate"}, {}};
      double worst = 1.0;
      for (const FairnessRow& f : fairness_study (sc, st, default_fairness_rates ()))
        {
          t.add_row ({static_cast<std::int64_t> (f.scenario), static_cast<std::int64_t> (f.seed),
                      digest, std::int64_t{f.nodes}, f.worst_index, f.worst_rate});
          worst = std::min (worst, f.worst_index);
        }
      r.tables.push_back (t);
      r.check ("fairness_within_bound", worst >= min_jain);
    }
  else
    throw ModelError ("unknown validation '" + which + "'");
  return finish (r, g);
}

int
cmd_sweep (const Global& g, const ProtocolFlags& pf, const std::string& param,
           const std::string& values)
{
  StudyConfig st = pf.study ();
  std::vector<int> v;
  if (!values.empty ())
    for (double x : parse_list (values))
      v.push_back (static_cast<int> (x));
  else if (param == "n_c")
    v = {3, 4, 5, 6};
  else if (param == "n_t")
    v = {2, 3, 4, 5};
  else
    v = {1, 2, 3, 4};
  ExperimentReport r = new_report ("sweep", g, st);
  Table t{"sweep", {"parameter", "value", "b1", "b2", "b", "b_prime", "seed", "param_digest"}, {}};
  bool min_ok = true;
  for (const SweepRow& s : sensitivity_sweep (param, v, st))
    {
      t.add_row ({s.parameter, std::int64_t{s.value}, s.b1, s.b2, s.b, s.b_prime,
                  static_cast<std::int64_t> (g.seed), r.provenance.param_digest});
      min_ok = min_ok && s.b == std::min (s.b1, s.b2);
    }
  r.tables.push_back (t);
  r.check ("b_is_min", min_ok);
  return finish (r, g);
}

int
cmd_perturb (const Global& g, const std::string& path, double step, double max_excess,
             const ScenarioFlags& sf, const ProtocolFlags& pf)
{
  ScenarioFile f = scenario_input (path, g, sf, pf);
  TreeTopology tree = f.tree ? *f.tree : shortest_path_tree (f.graph);
  StudyConfig st;
  st.params = f.params;
  st.l = f.l;
  st.qos = f.qos;
  SearchOptions so;
  so.step = step;
  SearchResult s = throughput_search (tree, st.l, st.params, st.qos, Layer::Detailed, so);
  ExperimentReport r = new_report ("perturb", g, st);
  PerturbationResult zero = perturbation_study (tree, s.lambda_hat, g.seed, st, true);
  PerturbationResult p = perturbation_study (tree, s.lambda_hat, g.seed, st);

  Table rates{"rates", {"source", "rate"}, {}};
  for (const auto& [id, v] : p.rates)
    rates.add_row ({std::int64_t{id}, v});
  Table summary{"perturbation",
                {"lambda_hat", "mean_rate", "max_delta", "delta_bar", "max_hop_delay", "d_bar",
                 "discard_ok", "delay_ok", "discard_excess_pct", "seed", "scenario_seed",
                 "param_digest"},
                {}};
  summary.add_row ({p.lambda_hat, p.mean_rate, p.max_delta, st.qos.delta_bar, p.max_hop_delay,
                    st.qos.d_bar, p.discard_ok, p.delay_ok, p.discard_excess_pct,
                    static_cast<std::int64_t> (g.seed), scenario_seed_cell (f),
                    r.provenance.param_digest});
  r.tables = {summary, rates};
  r.check ("unperturbed_meets_discard", zero.discard_ok);
  r.check ("delay_target_met", p.delay_ok);
  r.check ("discard_excess_within_bound", p.discard_excess_pct <= max_excess);
  r.check ("mean_rate_near_lambda_hat", std::abs (p.mean_rate - p.lambda_hat) <= 0.01 + 1e-12);
  return finish (r, g);
}

} // namespace

int
main (int argc, char** argv)
{
  CLI::App app{"Throughput-region analysis and tree design for CSMA/CA sensor networks"};
  app.require_subcommand (1);
  app.fallthrough ();
  Global g;
  app.add_option ("--seed", g.seed, "Random seed")->capture_default_str ();
  app.add_option ("--format", g.format, "Output format")
    ->check (CLI::IsMember ({"json", "csv"}))
    ->capture_default_str ();
  app.add_option ("--out", g.out, "Output path ('-' for stdout)")->capture_default_str ();

  ScenarioFlags sf;
  ProtocolFlags pf;

  auto* gen = app.add_subcommand ("scenario-gen", "Generate a random scenario");
  sf.add (gen, false);
  pf.add (gen);

  std::string scenario_path, layer = "both", tree_mode = "file";
  std::optional<double> rate;
  auto* analyze = app.add_subcommand ("analyze", "Run the fixed-point analyses on a tree");
  analyze->add_option ("--scenario", scenario_path, "Scenario JSON (generated from --seed if absent)");
  analyze->add_option ("--layer", layer, "detailed, simplified or both")
    ->check (CLI::IsMember ({"detailed", "simplified", "both"}));
  analyze->add_option ("--rate", rate, "Equal source rate, packets/s")->check (CLI::NonNegativeNumber);
  analyze->add_option ("--tree", tree_mode, "file (scenario tree, else SPT) or spt")
    ->check (CLI::IsMember ({"file", "spt"}));
  sf.add (analyze, false);
  pf.add (analyze);

  bool human = false;
  auto* bounds = app.add_subcommand ("bounds", "Compute the explicit throughput bounds");
  pf.add (bounds);
  bounds->add_flag ("--human", human, "Plain-text table instead of a report");

  std::string mode = "spt", design_layer = "detailed";
  double grid_step = 0.1;
  bool no_search = false, check_delay = false;
  auto* design = app.add_subcommand ("design", "Build and score tree topologies");
  design->add_option ("--scenario", scenario_path, "Scenario JSON (generated from --seed if absent)");
  design->add_option ("--mode", mode, "spt, steiner or enumerate")
    ->check (CLI::IsMember ({"spt", "steiner", "enumerate"}));
  design->add_option ("--layer", design_layer, "Analysis used by the throughput search")
    ->check (CLI::IsMember ({"detailed", "simplified"}));
  design->add_option ("--grid-step", grid_step, "Throughput search step, packets/s")
    ->check (CLI::PositiveNumber);
  design->add_flag ("--no-search", no_search, "Skip the throughput search");
  design->add_flag ("--check-delay", check_delay, "Also require the per-hop delay target");
  ScenarioFlags design_sf;
  design_sf.add (design, false);
  pf.add (design);

  auto* validate = app.add_subcommand ("validate", "Validation studies over generated scenarios");
  validate->require_subcommand (1);
  validate->fallthrough ();
  std::string fractions;
  double max_tau = 12.0, max_delivery = 0.2, max_delay = 7.0, max_slack = 3.5, min_jain = 0.985;
  std::string which;
  for (const char* name : {"accuracy", "slackness", "fairness"})
    {
      auto* sub = validate->add_subcommand (name, std::string ("Run the ") + name + " study");
      sub->callback ([&which, name] { which = name; });
      sub->add_option ("--fractions", fractions,
                       "Comma-separated rates as fractions of the uniqueness limit");
      sub->add_option ("--max-tau-err", max_tau, "Accuracy: tau error bound, %");
      sub->add_option ("--max-delivery-err", max_delivery, "Accuracy: delivery error bound, %");
      sub->add_option ("--max-delay-err", max_delay, "Accuracy: delay error bound, %");
      sub->add_option ("--max-slack", max_slack, "Slackness bound, %");
      sub->add_option ("--min-jain", min_jain, "Fairness lower bound");
    }
  sf.add (validate, true);
  pf.add (validate);

  std::string sweep_param = "n_c", sweep_values;
  auto* sweep = app.add_subcommand ("sweep", "Bounds as one protocol parameter varies");
  sweep->add_option ("--param", sweep_param, "n_c, n_t or be_min")
    ->check (CLI::IsMember ({"n_c", "n_t", "be_min"}));
  sweep->add_option ("--values", sweep_values, "Comma-separated values");
  pf.add (sweep);

  double perturb_step = 0.1, max_excess = 0.5;
  auto* perturb = app.add_subcommand ("perturb", "Perturb equal rates around the searched throughput");
  perturb->add_option ("--scenario", scenario_path, "Scenario JSON (generated from --seed if absent)");
  perturb->add_option ("--grid-step", perturb_step, "Throughput search step")->check (CLI::PositiveNumber);
  perturb->add_option ("--max-excess", max_excess, "Allowed relative discard excess, %");
  ScenarioFlags perturb_sf;
  perturb_sf.add (perturb, false);
  pf.add (perturb);

  CLI11_PARSE (app, argc, argv);

  try
    {
      if (*gen)
        return cmd_scenario_gen (g, sf, pf);
      if (*analyze)
        return cmd_analyze (g, scenario_path, layer, rate, tree_mode, sf, pf);
      if (*bounds)
        return cmd_bounds (g, pf, human);
      if (*design)
        return cmd_design (g, scenario_path, mode, design_sf.cfg.h_max, design_sf.cfg.n_max,
                           design_sf.cfg.restarts, design_layer, grid_step,
                           !no_search, check_delay, design_sf, pf);
      if (*validate)
        return cmd_validate (g, which, sf, pf, fractions, max_tau, max_delivery, max_delay,
                             max_slack, min_jain);
      if (*sweep)
        return cmd_sweep (g, pf, sweep_param, sweep_values);
      if (*perturb)
        return cmd_perturb (g, scenario_path, perturb_step, max_excess, perturb_sf, pf);
    }
  catch (const std::exception& e)
    {
      std::cerr << "error: " << e.what () << "\n";
      return 2;
    }
  return 0;
}
