// Full no-hidden-node fixed point over per-node MAC state, plus the
// two-moment (QNA-style) delay chain along the tree.

#pragma once

#include "wsnqos/model.hpp"

#include <map>
#include <vector>

namespace wsnqos {

struct DetailedOptions
{
  double tol = 1e-9;
  int max_iter = 10000;
  double damping = 0.5;
  bool record_residuals = false;
};

struct DetailedNodeState
{
  double beta = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  double c = 0.0;
  double tau_perceived = 0.0; ///< this node's attempt rate as seen by others
  double tau_minus = 0.0;     ///< sum over the other nodes
  double b = 0.0;
  double q = 0.0;
  double p = 0.0;
  double gamma = 0.0;
  double r = 0.0;
  double sigma_inv = 0.0; ///< mean service time, symbols
  double delta = 0.0;
  double nu = 0.0;    ///< packets/symbol
  double theta = 0.0; ///< packets/symbol
  bool saturated = false;
};

struct DetailedSolution
{
  std::vector<DetailedNodeState> nodes; ///< by node id
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  bool saturated = false;
  std::vector<NodeId> saturated_nodes;
  std::vector<double> residuals;

  const DetailedNodeState& at (NodeId id) const { return nodes.at (static_cast<std::size_t> (id)); }
};

DetailedSolution solve_detailed (const TreeTopology& tree, const ArrivalRates& rates,
                                 const ProtocolParams& params, double l,
                                 const DetailedOptions& options = {});

/// p = (R3 + R4) / (eta + (1 - eta) c), R3 = eta (1 - exp(-12 tau_minus)),
/// R4 = (1 - eta) c; 0 when the denominator vanishes.
double collision_probability (double eta, double c, double tau_minus,
                              const ProtocolParams& params);

struct ServiceMoments
{
  double es = 0.0;  ///< symbols
  double es2 = 0.0; ///< symbols^2
  double cs2 = 0.0;
};

/// Moments of the HOL service time with exponential backoff (rate
/// beta (1 - alpha) towards a transmission), deterministic airtime and
/// geometric retries with failure probability gamma. Discards are ignored.
ServiceMoments service_moments (double beta, double alpha, double gamma,
                                const ProtocolParams& params);

/// Moment generating function of the same service time (for testing).
double service_mgf (double z, double beta, double alpha, double gamma,
                    const ProtocolParams& params);

struct QnaNodeState
{
  double es = 0.0;
  double es2 = 0.0;
  double cs2 = 0.0;
  double ca2 = 1.0;
  double cd2 = 1.0;
  double rho = 0.0;
  double sojourn = 0.0;  ///< symbols
  double total_in = 0.0; ///< packets/symbol
};

struct QnaResult
{
  std::vector<QnaNodeState> nodes;           ///< by node id
  std::map<NodeId, double> end_to_end_delay; ///< symbols
};

/// Throws UnstableQueue naming the first node (leaves first) with rho >= 1.
QnaResult qna_delay (const TreeTopology& tree, const DetailedSolution& sol,
                     const ArrivalRates& rates, const ProtocolParams& params);

struct EndToEnd
{
  double delivery = 1.0;
  double delay = 0.0;
};

/// Delivery is the product of (1 - delta) along the path, delay the sum of
/// per-node sojourns. Both inputs are indexed by node id.
std::map<NodeId, EndToEnd> end_to_end (const TreeTopology& tree, const std::vector<double>& delta,
                                       const std::vector<double>& sojourn);

} // namespace wsnqos
