// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
// Exit status is nonzero when any criterion fails, except those listed in
// kKnownFailures; those still print FAIL and are summarised at the end.

#include "wsnqos/bounds.hpp"
#include "wsnqos/designer.hpp"
#include "wsnqos/detailed.hpp"
#include "wsnqos/experiments.hpp"
#include "wsnqos/simplified.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>

using namespace wsnqos;

namespace {

// Worst relative slack of the scalar dominating solution; see README.
const std::set<int> kKnownFailures{5};

struct Outcome
{
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double
seconds_since (Clock::time_point t0)
{
  return std::chrono::duration<double> (Clock::now () - t0).count ();
}

std::string
fmt (const char* f, double a)
{
  char buf[128];
  std::snprintf (buf, sizeof buf, f, a);
  return buf;
}

const StudyConfig kCfg{};
constexpr std::uint64_t kScenarioSeed = 1;
constexpr int kScenarios = 5;

const std::vector<Scenario>&
scenarios ()
{
  static const std::vector<Scenario> s = generate_scenarios (kScenarioSeed, kScenarios);
  return s;
}

Outcome
bounds_table ()
{
  auto t0 = Clock::now ();
  struct Row
  {
    std::string param;
    int value;
    double b1, b2, b, bp; // NaN where the table has no entry
  };
  const double na = std::nan ("");
  const std::vector<Row> table{
    {"n_c", 3, 67.11, 66, 66, 122.21},      {"n_c", 4, 92.64, 91, 91, 101.28},
    {"n_c", 5, 80.75, 110.5, 80.75, 82.85}, {"n_c", 6, 62.22, 126, 62.22, 67.18},
    {"n_t", 2, 80.75, 107, 80.75, 85.32},   {"n_t", 3, 80.75, 110.5, 80.75, 82.85},
    {"n_t", 4, 80.75, 110.5, 80.75, 82.85}, {"n_t", 5, 80.75, 110.5, 80.75, 82.7},
    {"be_min", 1, na, na, na, 164.95},      {"be_min", 2, na, na, na, 128.93},
    {"be_min", 3, na, na, na, 82.85},       {"be_min", 4, na, na, na, 35.67}};

  double worst = 0.0;
  std::string where;
  for (const Row& r : table)
    {
      SweepRow got = sensitivity_sweep (r.param, {r.value}, kCfg).front ();
      const double want[] = {r.b1, r.b2, r.b, r.bp};
      const double have[] = {got.b1, got.b2, got.b, got.b_prime};
      for (int k = 0; k < 4; ++k)
        {
          if (std::isnan (want[k]))
            continue;
          double err = std::abs (have[k] - want[k]) / want[k];
          if (err > worst)
            {
              worst = err;
              where = r.param + "=" + std::to_string (r.value);
            }
        }
    }
  double elapsed = seconds_since (t0);
  Outcome o;
  o.pass = worst <= 0.02 && elapsed < 1.0;
  o.detail = "worst relative error " + fmt ("%.3f%%", 100 * worst) + " at " + where + ", "
             + fmt ("%.3f s", elapsed);
  return o;
}

Outcome
qos_split ()
{
  QosTargets q = split_qos (0.9, 0.1, 5);
  Outcome o;
  o.pass = std::abs (q.delta_bar - 0.0208) <= 0.0001 && q.d_bar == 0.02;
  o.detail = "delta_bar " + fmt ("%.6f", q.delta_bar) + ", d_bar " + fmt ("%.17g s", q.d_bar);
  return o;
}

Outcome
beta_anchors ()
{
  ProtocolParams p;
  // exact rational: 1/beta must be the integer mean backoff
  double b0 = beta_from_alpha (p, 0.0), b1 = beta_from_alpha (p, 1.0);
  Outcome o;
  o.pass = mean_backoff (p, 0.0) == 78.0 && mean_backoff (p, 1.0) == 1190.0 && b0 == 1.0 / 78.0
           && b1 * 238.0 == 1.0;
  o.detail = "1/beta(0) = " + fmt ("%.17g", 1 / b0) + ", 1/beta(1) = " + fmt ("%.17g", 1 / b1);
  return o;
}

Outcome
contraction ()
{
  auto t0 = Clock::now ();
  ProtocolParams p;
  const double db = kCfg.qos.delta_bar;
  const double b1 = bound_b1 (db, p);
  Rng rng (404);
  double worst_ratio_gap = -1.0; // max (ratio - L)
  double worst_init = 0.0, worst_l = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 20; ++trial)
    {
      TreeTopology t = test::random_tree (rng, 10 + static_cast<int> (rng.below (31)));
      ArrivalRates rates = ArrivalRates::uniform (t.sources (), 0.9 * b1 / t.total_hops ());
      VectorOptions o;
      o.delta_bar = db;
      SimplifiedSolution a = solve_vector (t, rates, p, kCfg.l, o);
      double l_sum = a.contraction_constant;
      worst_l = std::max (worst_l, l_sum);
      ok = ok && a.converged && a.unique && l_sum < 1.0;
      double scale = a.step_norms.empty () ? 0.0 : a.step_norms.front ();
      for (std::size_t k = 1; k < a.step_norms.size (); ++k)
        {
          // ratios of steps at rounding level are noise
          if (a.step_norms[k - 1] < 1e-12 * scale || a.step_norms[k] < 1e-13 * scale)
            break;
          double ratio = a.step_norms[k] / a.step_norms[k - 1];
          worst_ratio_gap = std::max (worst_ratio_gap, ratio - l_sum);
        }
      VectorOptions top = o;
      top.initial = std::vector<double> (t.id_space (), attempt_cap (db, p));
      SimplifiedSolution b = solve_vector (t, rates, p, kCfg.l, top);
      ok = ok && b.converged;
      double mag = 0.0, diff = 0.0;
      for (NodeId v : t.members ())
        {
          auto i = static_cast<std::size_t> (v);
          mag = std::max (mag, a.tau_minus[i]);
          diff = std::max (diff, std::abs (a.tau_minus[i] - b.tau_minus[i]));
        }
      worst_init = std::max (worst_init, diff / mag);
    }
  double elapsed = seconds_since (t0);
  Outcome out;
  out.pass = ok && worst_ratio_gap <= 0.0 && worst_init <= 1e-8 && elapsed < 10.0;
  out.detail = "max(ratio - sum L) " + fmt ("%.3g", worst_ratio_gap) + ", max sum L "
               + fmt ("%.4f", worst_l) + ", init spread " + fmt ("%.2g", worst_init) + ", "
               + fmt ("%.2f s", elapsed);
  return out;
}

Outcome
domination_slack ()
{
  auto rows = validate_slackness (scenarios (), kCfg);
  bool dom = true, mono = true;
  double worst = 0.0, least = 1e300;
  for (const SlackRow& r : rows)
    {
      dom = dom && r.domination;
      mono = mono && r.monotone;
      worst = std::max (worst, r.worst_slack_pct);
      least = std::min (least, r.least_slack_pct);
    }
  Outcome o;
  o.pass = dom && worst <= 3.5;
  o.detail = std::string ("domination ") + (dom ? "holds" : "VIOLATED") + ", monotone from top "
             + (mono ? "yes" : "no") + ", worst slack " + fmt ("%.3f%%", worst) + " (limit 3.5%)"
             + ", least " + fmt ("%.3f%%", least);
  return o;
}

Outcome
accuracy ()
{
  auto t0 = Clock::now ();
  auto rows = validate_accuracy (scenarios (), kCfg);
  double tau = 0, del = 0, dly = 0;
  int unconv = 0;
  for (const AccuracyRow& r : rows)
    {
      tau = std::max (tau, r.tau_err_pct);
      del = std::max (del, r.delivery_err_pct);
      dly = std::max (dly, r.delay_err_pct);
      unconv += r.unconverged;
    }
  double elapsed = seconds_since (t0);
  Outcome o;
  o.pass = unconv == 0 && tau <= 12.0 && del <= 0.2 && dly <= 7.0 && elapsed < 120.0;
  o.detail = "tau " + fmt ("%.2f%%", tau) + ", delivery " + fmt ("%.3f%%", del) + ", delay "
             + fmt ("%.2f%%", dly) + ", unconverged " + std::to_string (unconv) + ", "
             + fmt ("%.2f s", elapsed);
  return o;
}

Outcome
soundness ()
{
  ProtocolParams p;
  const QosTargets& q = kCfg.qos;
  ThroughputBounds b = compute_bounds (q.delta_bar, q.d_bar, kCfg.l, p);
  Rng rng (2024);
  int cases = 0, violations = 0, attempts = 0;
  double worst_delta = 0, worst_delay = 0;
  while (cases < 100 && attempts < 10000)
    {
      ++attempts;
      TreeTopology t = test::random_tree (rng, 3 + static_cast<int> (rng.below (38)));
      std::map<NodeId, double> w;
      for (NodeId s : t.sources ())
        w[s] = -std::log (1.0 - rng.uniform ());
      ArrivalRates dir (w);
      double total = dir.total_load (t);
      auto nu = node_loads (t, dir);
      double peak = *std::max_element (nu.begin (), nu.end ());
      // largest multiple of the direction inside the region, shrunk mostly
      // by little so that many cases sit near the boundary
      double u = rng.uniform ();
      double s = std::min (b.b / total, b.b_prime / peak) * (1.0 - u * u * u);
      for (auto& [id, v] : w)
        v *= s;
      ArrivalRates rates (w);
      if (!member_delta_delay (t, rates, b))
        continue;
      ++cases;
      SimplifiedSolution sol = solve_vector (t, rates, p, kCfg.l);
      SimplifiedDelays d = simplified_delays (t, sol, p);
      for (NodeId v : t.members ())
        {
          auto i = static_cast<std::size_t> (v);
          double hop = symbols_to_seconds (d.sojourn[i], p);
          worst_delta = std::max (worst_delta, sol.delta[i]);
          worst_delay = std::max (worst_delay, hop);
          if (!sol.converged || sol.delta[i] > q.delta_bar || hop > q.d_bar)
            ++violations;
        }
    }
  Outcome o;
  o.pass = cases == 100 && violations == 0;
  o.detail = std::to_string (cases) + " members, " + std::to_string (violations)
             + " violations, max delta " + fmt ("%.5f", worst_delta) + " (target "
             + fmt ("%.5f", q.delta_bar) + "), max hop delay " + fmt ("%.4f s", 1.0 * worst_delay);
  return o;
}

std::vector<OptimalityRow>&
optimality_rows ()
{
  static std::vector<OptimalityRow> rows = [] {
    std::vector<OptimalityRow> r;
    for (std::size_t k = 0; k < scenarios ().size (); ++k)
      r.push_back (optimality_study (scenarios ()[k], k, kCfg, Layer::Detailed, 0.1));
    return r;
  }();
  return rows;
}

Outcome
spt_dominance ()
{
  int inner = 0, searched = 0;
  std::size_t cands = 0;
  for (const OptimalityRow& r : optimality_rows ())
    {
      inner += r.inner_violations;
      searched += r.searched_violations;
      cands += r.candidates;
    }
  Outcome o;
  o.pass = inner == 0 && searched == 0 && cands > 0;
  o.detail = std::to_string (cands) + " candidates, inner-bound violations " + std::to_string (inner)
             + ", searched violations " + std::to_string (searched);
  return o;
}

Outcome
inner_gap ()
{
  int sandwich = 0;
  double ratio = 1.0;
  for (const OptimalityRow& r : optimality_rows ())
    {
      sandwich += r.sandwich_violations;
      ratio = std::min (ratio, r.min_ratio);
    }
  Outcome o;
  o.pass = sandwich == 0 && ratio >= 0.6;
  o.detail = "lambda_tilde > lambda_hat in " + std::to_string (sandwich)
             + " candidates, min ratio " + fmt ("%.4f", ratio);
  return o;
}

Outcome
derivative ()
{
  ProtocolParams p;
  double b1 = per_second_to_per_symbol (bound_b1 (kCfg.qos.delta_bar, p), p);
  double worst = 0.0;
  for (int k = 1; k <= 50; ++k)
    {
      double m = b1 * k / 51.0;
      double h = 1e-5 * m;
      double fd = (solve_scalar (m + h, p).tau_bar - solve_scalar (m - h, p).tau_bar) / (2 * h);
      worst = std::max (worst, std::abs (scalar_derivative (m, p) - fd) / std::abs (fd));
    }
  Outcome o;
  o.pass = worst <= 1e-4;
  o.detail = "50 loads, worst relative error " + fmt ("%.3g", worst);
  return o;
}

Outcome
fairness ()
{
  auto rows = fairness_study (scenarios (), kCfg, default_fairness_rates ());
  double worst = 1.0;
  for (const FairnessRow& r : rows)
    worst = std::min (worst, r.worst_index);
  Outcome o;
  o.pass = worst >= 0.985;
  o.detail = "min Jain index " + fmt ("%.5f", worst);
  return o;
}

} // namespace

int
main ()
{
  const std::vector<std::pair<int, std::function<Outcome ()>>> criteria{
    {1, bounds_table}, {2, qos_split},  {3, beta_anchors}, {4, contraction},
    {5, domination_slack}, {6, accuracy}, {7, soundness}, {8, spt_dominance},
    {9, inner_gap},    {10, derivative}, {11, fairness}};

  int unexpected = 0;
  std::vector<int> known;
  for (const auto& [id, fn] : criteria)
    {
      Outcome o;
      try
        {
          o = fn ();
        }
      catch (const std::exception& e)
        {
          o.detail = std::string ("exception: ") + e.what ();
        }
      std::printf ("%s %d: %s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str ());
      std::fflush (stdout);
      if (!o.pass)
        {
          if (kKnownFailures.count (id))
            known.push_back (id);
          else
            ++unexpected;
        }
    }
  for (int id : known)
    std::printf ("note: criterion %d fails as documented\n", id);
  return unexpected == 0 ? 0 : 1;
}
