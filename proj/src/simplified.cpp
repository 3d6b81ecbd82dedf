#include "wsnqos/simplified.hpp"

#include "wsnqos/bounds.hpp"
#include "wsnqos/detailed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wsnqos {

UnstableQueue::UnstableQueue (NodeId node, double rho)
  : std::runtime_error ("queue at node " + std::to_string (node)
                        + " is unstable (rho = " + std::to_string (rho) + ")"),
    node_ (node), rho_ (rho)
{
}

double
alpha_from_tau (double tau, double tx_symbols)
{
  return tx_symbols * tau / (1.0 + tx_symbols * tau);
}

double
gamma_from_tau (double tau, double l, const ProtocolParams& params)
{
  return l + (1.0 - l) * (1.0 - std::exp (-params.turnaround_symbols * tau));
}

double
discard_probability (double alpha, double gamma, const ProtocolParams& params)
{
  if (alpha < 0.0 || alpha > 1.0 || gamma < 0.0 || gamma > 1.0)
    throw ModelError ("alpha and gamma must lie in [0,1]");
  double cca_fail = std::pow (alpha, params.n_c);
  double r = gamma * (1.0 - cca_fail);
  return cca_fail * geometric_sum (r, params.n_t) + std::pow (r, params.n_t);
}

double
discard_from_tau (double tau, double l, const ProtocolParams& params)
{
  return discard_probability (alpha_from_tau (tau, tx_duration (params)),
                              gamma_from_tau (tau, l, params), params);
}

double
contraction_constant (double total_load_per_symbol, double delta_bar, const ProtocolParams& params)
{
  double am = alpha_max (delta_bar, params);
  return tx_duration (params) * geometric_sum_derivative (am, params.n_c) * total_load_per_symbol;
}

namespace {

double
attempts_at (double tau, double tx, int n_c)
{
  return geometric_sum (alpha_from_tau (tau, tx), n_c);
}

} // namespace

SimplifiedSolution
solve_vector (const TreeTopology& tree, const ArrivalRates& rates, const ProtocolParams& params,
              double l, const VectorOptions& options)
{
  params.validate ();
  const double tx = tx_duration (params);
  const std::size_t n = tree.id_space ();
  const auto& members = tree.members ();

  SimplifiedSolution sol;
  sol.nu = node_loads (tree, rates);
  for (double& v : sol.nu)
    v = per_second_to_per_symbol (v, params);

  double load = per_second_to_per_symbol (rates.total_load (tree), params);
  sol.contraction_constant = std::numeric_limits<double>::quiet_NaN ();
  if (options.delta_bar)
    {
      sol.contraction_constant = contraction_constant (load, *options.delta_bar, params);
      double b1 = per_second_to_per_symbol (bound_b1 (*options.delta_bar, params), params);
      sol.unique = load < b1;
    }
  const double damping = sol.unique ? 1.0 : options.damping;

  std::vector<double> x (n, 0.0);
  if (options.initial)
    {
      if (options.initial->size () != n)
        throw ModelError ("initial iterate has the wrong size");
      for (NodeId v : members)
        x[static_cast<std::size_t> (v)] = (*options.initial)[static_cast<std::size_t> (v)];
    }
  if (options.record_iterates)
    sol.iterates.push_back (x);

  std::vector<double> contrib (n, 0.0);
  std::vector<double> next (n, 0.0);
  for (int it = 1; it <= options.max_iter; ++it)
    {
      double total = 0.0;
      for (NodeId v : members)
        {
          auto i = static_cast<std::size_t> (v);
          contrib[i] = sol.nu[i] * attempts_at (x[i], tx, params.n_c);
          total += contrib[i];
        }
      double step = 0.0;
      for (NodeId v : members)
        {
          auto i = static_cast<std::size_t> (v);
          // Subtraction can leave a tiny negative residue when one node
          // carries all the load.
          double f = std::max (0.0, total - contrib[i]);
          next[i] = x[i] + damping * (f - x[i]);
          step = std::max (step, std::abs (next[i] - x[i]));
        }
      std::swap (x, next);
      sol.step_norms.push_back (step);
      if (options.record_iterates)
        sol.iterates.push_back (x);
      sol.iterations = it;
      sol.residual = step;
      if (step <= options.tol)
        {
          sol.converged = true;
          break;
        }
      if (!std::isfinite (step))
        break;
    }

  sol.tau_minus = x;
  sol.alpha.assign (n, 0.0);
  sol.beta.assign (n, 0.0);
  sol.gamma.assign (n, 0.0);
  sol.delta.assign (n, 0.0);
  for (NodeId v : members)
    {
      auto i = static_cast<std::size_t> (v);
      sol.alpha[i] = alpha_from_tau (x[i], tx);
      sol.beta[i] = beta_from_alpha (params, sol.alpha[i]);
      sol.gamma[i] = gamma_from_tau (x[i], l, params);
      sol.delta[i] = discard_probability (sol.alpha[i], sol.gamma[i], params);
    }
  return sol;
}

ScalarSolution
solve_scalar (double total_load_per_symbol, const ProtocolParams& params, const ScalarOptions& options)
{
  params.validate ();
  if (!(total_load_per_symbol >= 0.0))
    throw ModelError ("total load must be >= 0");
  const double tx = tx_duration (params);
  const double m = total_load_per_symbol;

  ScalarSolution sol;
  sol.total_load = m;
  if (options.delta_bar)
    sol.unique = contraction_constant (m, *options.delta_bar, params) < 1.0
                 && m < per_second_to_per_symbol (bound_b1 (*options.delta_bar, params), params);
  const double damping = sol.unique ? 1.0 : options.damping;

  double tau = m;
  for (int it = 1; it <= options.max_iter; ++it)
    {
      double f = m * attempts_at (tau, tx, params.n_c);
      double next = tau + damping * (f - tau);
      double step = std::abs (next - tau);
      tau = next;
      sol.iterations = it;
      if (step <= options.tol * std::max (1.0, tau))
        {
          sol.converged = true;
          break;
        }
    }
  sol.tau_bar = tau;
  sol.alpha = alpha_from_tau (tau, tx);
  return sol;
}

double
scalar_derivative (double total_load_per_symbol, const ProtocolParams& params)
{
  const double m = total_load_per_symbol;
  if (m <= 0.0)
    return 1.0; // g(0)
  const double tx = tx_duration (params);
  double h = solve_scalar (m, params).tau_bar;
  double alpha = alpha_from_tau (h, tx);
  double dalpha = tx / ((1.0 + tx * h) * (1.0 + tx * h));
  double gprime = geometric_sum_derivative (alpha, params.n_c) * dalpha;
  return (h / m) / (1.0 - m * gprime);
}

Domination
domination_check (const TreeTopology& tree, const ArrivalRates& rates, const ProtocolParams& params,
                  double l, double delta_bar)
{
  Domination d;
  double load = per_second_to_per_symbol (rates.total_load (tree), params);
  ScalarOptions sopt;
  sopt.delta_bar = delta_bar;
  d.tau_bar = solve_scalar (load, params, sopt).tau_bar;

  VectorOptions vopt;
  vopt.delta_bar = delta_bar;
  vopt.initial = std::vector<double> (tree.id_space (), d.tau_bar);
  vopt.record_iterates = true;
  SimplifiedSolution sol = solve_vector (tree, rates, params, l, vopt);

  for (NodeId v : tree.members ())
    d.max_tau_minus = std::max (d.max_tau_minus, sol.tau_minus[static_cast<std::size_t> (v)]);
  d.slack = d.tau_bar > 0.0 ? (d.tau_bar - d.max_tau_minus) / d.tau_bar : 0.0;

  // Allow rounding noise relative to the iterate magnitude.
  const double eps = 1e-12 * std::max (d.tau_bar, 1e-300);
  for (std::size_t k = 1; k < sol.iterates.size (); ++k)
    for (NodeId v : tree.members ())
      {
        auto i = static_cast<std::size_t> (v);
        if (sol.iterates[k][i] > sol.iterates[k - 1][i] + eps)
          d.monotone_from_top = false;
      }
  return d;
}

double
mg1_delay (double nu, double alpha, double gamma, double beta, const ProtocolParams& params)
{
  const double tx = tx_duration (params);
  if (!(beta > 0.0) || alpha >= 1.0 || gamma >= 1.0)
    throw ModelError ("service time diverges (beta <= 0, alpha >= 1 or gamma >= 1)");
  double x = beta * (1.0 - alpha);
  double es = (1.0 + x * tx) / (x * (1.0 - gamma));
  double cs2 = gamma + 1.0 / ((1.0 + x * tx) * (1.0 + x * tx));
  double rho = nu * es;
  if (rho >= 1.0)
    throw UnstableQueue (kNoParent, rho);
  return rho * es * (1.0 + cs2) / (2.0 * (1.0 - rho)) + es;
}

SimplifiedDelays
simplified_delays (const TreeTopology& tree, const SimplifiedSolution& sol, const ProtocolParams& params)
{
  SimplifiedDelays out;
  const std::size_t n = tree.id_space ();
  out.sojourn.assign (n, 0.0);
  out.rho.assign (n, 0.0);
  for (NodeId v : tree.members ())
    {
      auto i = static_cast<std::size_t> (v);
      ServiceMoments sm = service_moments (sol.beta[i], sol.alpha[i], sol.gamma[i], params);
      out.rho[i] = sol.nu[i] * sm.es;
      if (out.rho[i] >= 1.0)
        throw UnstableQueue (v, out.rho[i]);
      out.sojourn[i] = mg1_delay (sol.nu[i], sol.alpha[i], sol.gamma[i], sol.beta[i], params);
    }
  for (const auto& [src, metrics] : end_to_end (tree, sol.delta, out.sojourn))
    {
      out.delivery[src] = metrics.delivery;
      out.end_to_end_delay[src] = metrics.delay;
    }
  return out;
}

} // namespace wsnqos
