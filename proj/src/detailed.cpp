#include "wsnqos/detailed.hpp"

#include "wsnqos/simplified.hpp"

#include <algorithm>
#include <cmath>

namespace wsnqos {

double
collision_probability (double eta, double c, double tau_minus, const ProtocolParams& params)
{
  double denom = eta + (1.0 - eta) * c;
  if (denom <= 0.0)
    return 0.0;
  double r3 = eta * (1.0 - std::exp (-params.turnaround_symbols * tau_minus));
  double r4 = (1.0 - eta) * c;
  return std::clamp ((r3 + r4) / denom, 0.0, 1.0);
}

ServiceMoments
service_moments (double beta, double alpha, double gamma, const ProtocolParams& params)
{
  if (!(beta > 0.0) || !(alpha < 1.0) || !(gamma < 1.0))
    throw ModelError ("service time diverges (beta <= 0, alpha >= 1 or gamma >= 1)");
  const double t = tx_duration (params);
  const double x = beta * (1.0 - alpha);
  const double xt = x * t;
  ServiceMoments m;
  m.es = (1.0 + xt) / (x * (1.0 - gamma));
  m.es2 = (xt * xt * (1.0 + gamma) + 2.0 * xt * (1.0 + gamma) + 2.0)
          / (x * x * (1.0 - gamma) * (1.0 - gamma));
  m.cs2 = m.es2 / (m.es * m.es) - 1.0;
  return m;
}

double
service_mgf (double z, double beta, double alpha, double gamma, const ProtocolParams& params)
{
  const double x = beta * (1.0 - alpha);
  const double attempt = x / (x - z) * std::exp (z * tx_duration (params));
  return (1.0 - gamma) * attempt / (1.0 - gamma * attempt);
}

namespace {

struct Inner
{
  std::vector<double> tau;
  std::vector<double> alpha;
};

// One evaluation of the map (tau, alpha) -> (tau', alpha'), filling states.
void
evaluate (const TreeTopology& tree, const ArrivalRates& rates, const ProtocolParams& params,
          double l, const Inner& cur, std::vector<DetailedNodeState>& st, Inner& out)
{
  const double t = tx_duration (params);
  const double twelve = params.turnaround_symbols;
  double total = 0.0;
  for (NodeId v : tree.members ())
    total += cur.tau[static_cast<std::size_t> (v)];

  for (NodeId v : tree.members ())
    {
      auto i = static_cast<std::size_t> (v);
      DetailedNodeState& s = st[i];
      s.alpha = cur.alpha[i];
      s.tau_perceived = cur.tau[i];
      s.tau_minus = std::max (0.0, total - cur.tau[i]);
      s.beta = beta_from_alpha (params, s.alpha);
      s.eta = s.beta / (s.beta + s.tau_minus);
      s.c = 1.0 - std::exp (-twelve * s.beta);
      s.p = collision_probability (s.eta, s.c, s.tau_minus, params);
      s.gamma = s.p + (1.0 - s.p) * l;
      double cca_fail = std::pow (s.alpha, params.n_c);
      s.r = s.gamma * (1.0 - cca_fail);
      double bbar = mean_backoff (params, s.alpha);
      s.sigma_inv = (bbar + (1.0 - cca_fail) * t) * geometric_sum (s.r, params.n_t);
      s.delta = discard_probability (s.alpha, s.gamma, params);
      s.b = bbar / (bbar + (1.0 - cca_fail) * t);
    }

  // Goodput flows towards the sink.
  for (NodeId v : tree.leaves_first ())
    {
      auto i = static_cast<std::size_t> (v);
      DetailedNodeState& s = st[i];
      double in = rates.per_symbol (v, params);
      for (NodeId ch : tree.children (v))
        in += st[static_cast<std::size_t> (ch)].theta;
      s.nu = in;
      s.theta = in * (1.0 - s.delta);
    }

  for (NodeId v : tree.members ())
    {
      auto i = static_cast<std::size_t> (v);
      DetailedNodeState& s = st[i];
      double load = s.nu * s.sigma_inv;
      s.saturated = load >= 1.0;
      s.q = std::min (1.0, load);
      out.tau[i] = s.beta * s.b * s.q / (1.0 - s.q + s.q * s.b);
      double busy = (1.0 - s.eta) * (1.0 - s.c) * s.beta * t;
      double denom = s.eta + (1.0 - s.eta) * s.c + busy;
      out.alpha[i] = denom > 0.0 ? busy / denom : 0.0;
    }
}

} // namespace

DetailedSolution
solve_detailed (const TreeTopology& tree, const ArrivalRates& rates, const ProtocolParams& params,
                double l, const DetailedOptions& options)
{
  params.validate ();
  if (l < 0.0 || l >= 1.0)
    throw ModelError ("link error probability must lie in [0,1)");
  if (!(options.damping > 0.0 && options.damping <= 1.0))
    throw ModelError ("damping must lie in (0,1]");
  for (NodeId s : tree.sources ())
    (void) rates.at (s);

  const std::size_t n = tree.id_space ();
  DetailedSolution sol;
  sol.nodes.assign (n, DetailedNodeState{});
  Inner cur{std::vector<double> (n, 0.0), std::vector<double> (n, 0.0)};
  Inner nxt = cur;

  for (int it = 1; it <= options.max_iter; ++it)
    {
      evaluate (tree, rates, params, l, cur, sol.nodes, nxt);
      double res = 0.0;
      for (NodeId v : tree.members ())
        {
          auto i = static_cast<std::size_t> (v);
          res = std::max ({res, std::abs (nxt.tau[i] - cur.tau[i]), std::abs (nxt.alpha[i] - cur.alpha[i])});
          cur.tau[i] += options.damping * (nxt.tau[i] - cur.tau[i]);
          cur.alpha[i] += options.damping * (nxt.alpha[i] - cur.alpha[i]);
        }
      sol.iterations = it;
      sol.residual = res;
      if (options.record_residuals)
        sol.residuals.push_back (res);
      if (res < options.tol)
        {
          sol.converged = true;
          break;
        }
      if (!std::isfinite (res))
        break;
    }

  // Leave the reported state consistent with the final iterate.
  evaluate (tree, rates, params, l, cur, sol.nodes, nxt);
  for (NodeId v : tree.members ())
    if (sol.nodes[static_cast<std::size_t> (v)].saturated)
      {
        sol.saturated = true;
        sol.saturated_nodes.push_back (v);
      }
  return sol;
}

QnaResult
qna_delay (const TreeTopology& tree, const DetailedSolution& sol, const ArrivalRates& rates,
           const ProtocolParams& params)
{
  QnaResult out;
  out.nodes.assign (tree.id_space (), QnaNodeState{});
  std::vector<double> sojourn (tree.id_space (), 0.0);
  std::vector<double> delta (tree.id_space (), 0.0);

  for (NodeId v : tree.leaves_first ())
    {
      auto i = static_cast<std::size_t> (v);
      const DetailedNodeState& s = sol.nodes[i];
      QnaNodeState& q = out.nodes[i];
      ServiceMoments m = service_moments (s.beta, s.alpha, s.gamma, params);
      q.es = m.es;
      q.es2 = m.es2;
      q.cs2 = m.cs2;
      q.total_in = s.nu;
      q.rho = q.total_in * q.es;
      if (q.rho >= 1.0)
        throw UnstableQueue (v, q.rho);

      if (q.total_in > 0.0)
        {
          double acc = rates.per_symbol (v, params);
          for (NodeId ch : tree.children (v))
            {
              const QnaNodeState& c = out.nodes[static_cast<std::size_t> (ch)];
              acc += c.total_in * c.cd2;
            }
          q.ca2 = acc / q.total_in;
        }
      else
        q.ca2 = 1.0;

      q.cd2 = (1.0 - s.delta)
              * (1.0 + q.rho * q.rho * (q.cs2 - 1.0) + (1.0 - q.rho * q.rho) * (q.ca2 - 1.0));
      q.sojourn = q.rho * q.es * (q.ca2 + q.cs2) / (2.0 * (1.0 - q.rho)) + q.es;
      sojourn[i] = q.sojourn;
      delta[i] = s.delta;
    }

  for (const auto& [src, e] : end_to_end (tree, delta, sojourn))
    out.end_to_end_delay[src] = e.delay;
  return out;
}

std::map<NodeId, EndToEnd>
end_to_end (const TreeTopology& tree, const std::vector<double>& delta,
            const std::vector<double>& sojourn)
{
  std::map<NodeId, EndToEnd> out;
  for (NodeId src : tree.sources ())
    {
      EndToEnd e;
      for (NodeId v : tree.path (src))
        {
          auto i = static_cast<std::size_t> (v);
          e.delivery *= 1.0 - delta.at (i);
          e.delay += sojourn.at (i);
        }
      out[src] = e;
    }
  return out;
}

} // namespace wsnqos
