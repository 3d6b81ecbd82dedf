#include "wsnqos/bounds.hpp"

#include "wsnqos/simplified.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wsnqos {

QosTargets
split_qos (double p_del, double d_max_seconds, int h_max)
{
  if (!(p_del > 0.0 && p_del < 1.0))
    throw ModelError ("p_del must lie in (0,1)");
  if (!(d_max_seconds > 0.0))
    throw ModelError ("d_max must be positive");
  if (h_max < 1)
    throw ModelError ("h_max must be >= 1");
  QosTargets q;
  q.p_del = p_del;
  q.d_max = d_max_seconds;
  q.h_max = h_max;
  q.delta_bar = -std::expm1 (std::log (p_del) / h_max);
  q.d_bar = d_max_seconds / h_max;
  return q;
}

double
lone_packet_delay (const ProtocolParams& params, double l)
{
  double attempt = backoff_stage_means (params).front () + 2.0 * params.turnaround_symbols
                   + tx_duration (params) + params.ack_symbols;
  return geometric_sum (l, params.n_t) * attempt;
}

HopLimits
hop_limits (const ProtocolParams& params, double l, double d_max_seconds, double p_del, double r_cs,
            double r)
{
  if (!(l > 0.0 && l < 1.0))
    throw ModelError ("l must lie in (0,1)");
  if (!(d_max_seconds > 0.0) || !(p_del > 0.0 && p_del < 1.0) || !(r_cs > 0.0) || !(r > 0.0))
    throw ModelError ("hop limit inputs must be positive");
  HopLimits h;
  h.single_hop_delay = symbols_to_seconds (lone_packet_delay (params, l), params);
  h.h_delay = static_cast<std::int64_t> (std::floor (d_max_seconds / h.single_hop_delay));

  h.lone_packet_discard = std::pow (l, params.n_t + 1);
  double hd = std::floor (std::log (p_del) / std::log1p (-h.lone_packet_discard));
  h.h_delivery = hd >= 9.0e18 ? std::numeric_limits<std::int64_t>::max ()
                              : static_cast<std::int64_t> (hd);

  h.h_no_hidden = static_cast<std::int64_t> (std::floor (r_cs / (2.0 * r)));
  h.h_bar = std::min ({h.h_delay, h.h_delivery, h.h_no_hidden});
  return h;
}

double
alpha_max (double delta_bar, const ProtocolParams& params)
{
  if (!(delta_bar > 0.0 && delta_bar < 1.0))
    throw ModelError ("delta_bar must lie in (0,1)");
  return std::pow (delta_bar, 1.0 / params.n_c);
}

double
attempt_cap (double delta_bar, const ProtocolParams& params)
{
  double am = alpha_max (delta_bar, params);
  return am / (tx_duration (params) * (1.0 - am));
}

double
tau_max (double delta_bar, double l, const ProtocolParams& params)
{
  params.validate ();
  if (!(delta_bar > 0.0 && delta_bar < 1.0))
    throw ModelError ("delta_bar must lie in (0,1)");
  if (delta_bar <= std::pow (l, params.n_t))
    throw InfeasibleTarget ("delta_bar <= l^n_t: no positive attempt rate meets the discard target");
  double a = attempt_cap (delta_bar, params);
  if (discard_from_tau (a, l, params) < delta_bar)
    return a;
  double lo = 0.0;
  double hi = a;
  while (hi - lo > 1e-12 * std::max (a, 1e-300) && hi - lo > 1e-300)
    {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi)
        break;
      if (discard_from_tau (mid, l, params) < delta_bar)
        lo = mid;
      else
        hi = mid;
    }
  return lo;
}

double
bound_b1 (double delta_bar, const ProtocolParams& params)
{
  params.validate ();
  double am = alpha_max (delta_bar, params);
  double t = tx_duration (params);
  double a = am / (t * (1.0 - am));
  double first = a / geometric_sum (am, params.n_c);
  double gp = geometric_sum_derivative (am, params.n_c);
  double second = gp > 0.0 ? 1.0 / (t * gp) : std::numeric_limits<double>::infinity ();
  return per_symbol_to_per_second (std::min (first, second), params);
}

double
bound_b2 (double delta_bar, double l, const ProtocolParams& params)
{
  double tm = tau_max (delta_bar, l, params);
  // tau_bar(M) >= M, so the root lies in [0, tau_max].
  double lo = 0.0;
  double hi = tm;
  for (int k = 0; k < 200 && hi - lo > 1e-15 * tm; ++k)
    {
      double mid = 0.5 * (lo + hi);
      if (solve_scalar (mid, params).tau_bar <= tm)
        lo = mid;
      else
        hi = mid;
    }
  return per_symbol_to_per_second (lo, params);
}

double
bound_b (double delta_bar, double l, const ProtocolParams& params)
{
  return std::min (bound_b1 (delta_bar, params), bound_b2 (delta_bar, l, params));
}

ServiceEnvelope
service_envelope (double delta_bar, double l, const ProtocolParams& params)
{
  double tm = tau_max (delta_bar, l, params);
  double alpha = alpha_from_tau (tm, tx_duration (params));
  double backoff = mean_backoff (params, alpha);
  double t = tx_duration (params);
  ServiceEnvelope env;
  // Exponential backoff with mean B(alpha) followed by a deterministic frame.
  env.s_bar = backoff + t;
  env.cs2_bar = (backoff / env.s_bar) * (backoff / env.s_bar);
  return env;
}

double
bound_bprime (double delta_bar, double d_bar_seconds, double l, const ProtocolParams& params)
{
  ServiceEnvelope env = service_envelope (delta_bar, l, params);
  double d = seconds_to_symbols (d_bar_seconds, params);
  if (!(d > env.s_bar))
    throw InfeasibleTarget ("per-link delay target does not exceed the mean service time");
  double slack = 2.0 * (d - env.s_bar);
  double rho = slack / (env.s_bar * (1.0 + env.cs2_bar) + slack);
  return per_symbol_to_per_second (rho / env.s_bar, params);
}

ThroughputBounds
compute_bounds (double delta_bar, double d_bar_seconds, double l, const ProtocolParams& params)
{
  ThroughputBounds b;
  b.delta_bar = delta_bar;
  b.d_bar = d_bar_seconds;
  b.alpha_max = alpha_max (delta_bar, params);
  b.a = attempt_cap (delta_bar, params);
  b.tau_max = tau_max (delta_bar, l, params);
  b.tau_capped = b.tau_max >= b.a;
  b.b1 = bound_b1 (delta_bar, params);
  b.b2 = bound_b2 (delta_bar, l, params);
  b.b = std::min (b.b1, b.b2);
  ServiceEnvelope env = service_envelope (delta_bar, l, params);
  b.s_bar = env.s_bar;
  b.cs2_bar = env.cs2_bar;
  try
    {
      b.b_prime = bound_bprime (delta_bar, d_bar_seconds, l, params);
    }
  catch (const InfeasibleTarget&)
    {
      b.b_prime = 0.0;
      b.delay_feasible = false;
    }
  return b;
}

namespace {

double
max_node_load (const TreeTopology& tree, const ArrivalRates& rates)
{
  double m = 0.0;
  for (double v : node_loads (tree, rates))
    m = std::max (m, v);
  return m;
}

} // namespace

Membership
member_delta (const TreeTopology& tree, const ArrivalRates& rates, const ThroughputBounds& bounds)
{
  Membership m;
  m.total_load = rates.total_load (tree);
  m.max_node_load = max_node_load (tree, rates);
  m.member = m.total_load < bounds.b;
  if (!m.member)
    m.reason = "total load is not below B";
  return m;
}

Membership
member_delta_delay (const TreeTopology& tree, const ArrivalRates& rates,
                    const ThroughputBounds& bounds)
{
  Membership m = member_delta (tree, rates, bounds);
  if (!bounds.delay_feasible)
    {
      m.member = false;
      m.reason = "delay target infeasible";
    }
  else if (m.member && m.max_node_load > bounds.b_prime)
    {
      m.member = false;
      m.reason = "a node load exceeds B'";
    }
  return m;
}

double
equal_rate_inner_throughput (const TreeTopology& tree, const ThroughputBounds& bounds)
{
  int total = tree.total_hops ();
  if (total <= 0)
    throw ModelError ("tree has no sources");
  int max_m = 0;
  for (NodeId v : tree.members ())
    max_m = std::max (max_m, tree.sources_through (v));
  double by_discard = bounds.b / total;
  double by_delay = bounds.delay_feasible ? bounds.b_prime / max_m : 0.0;
  return std::min (by_discard, by_delay);
}

} // namespace wsnqos
