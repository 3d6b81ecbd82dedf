// Low-discard-regime analysis: the vector fixed point over per-node
// perceived attempt rates, its scalar total-load reduction, the shared
// discard formula and the M/G/1 per-hop delay.
//
// Rates are per symbol and times are in symbols throughout.

#pragma once

#include "wsnqos/model.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

namespace wsnqos {

/// Raised when a queue's utilization reaches 1.
class UnstableQueue : public std::runtime_error
{
public:
  UnstableQueue (NodeId node, double rho);
  NodeId node () const { return node_; }
  double rho () const { return rho_; }

private:
  NodeId node_;
  double rho_;
};

/// CCA failure probability seen by a node whose contenders attempt at
/// total rate tau (no-simultaneous-sensing approximation).
double alpha_from_tau (double tau, double tx_symbols);

/// Transmission failure probability: link error or a contender finishing
/// backoff inside the turnaround window.
double gamma_from_tau (double tau, double l, const ProtocolParams& params);

/// Packet discard probability after n_c successive CCA failures or n_t
/// transmission failures. Shared by both analysis layers.
double discard_probability (double alpha, double gamma, const ProtocolParams& params);

/// Discard probability as a function of the perceived attempt rate alone.
double discard_from_tau (double tau, double l, const ProtocolParams& params);

struct VectorOptions
{
  double tol = 1e-13;
  int max_iter = 100000;
  /// Damping applied when the uniqueness condition is not certified.
  double damping = 0.5;
  /// Per-link discard target; enables the uniqueness-regime certificate.
  std::optional<double> delta_bar;
  /// Starting point (indexed by node id); zero when absent.
  std::optional<std::vector<double>> initial;
  bool record_iterates = false;
};

struct SimplifiedSolution
{
  // Indexed by node id; zero for the sink and non-members.
  std::vector<double> nu; ///< aggregated load, packets/symbol
  std::vector<double> tau_minus;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<double> delta;

  bool converged = false;
  /// True when the contraction certificate holds (sum of Lipschitz constants < 1).
  bool unique = false;
  double contraction_constant = 0.0; ///< sum_j L_j, NaN without a target
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> step_norms; ///< max-norm distance between successive iterates
  std::vector<std::vector<double>> iterates;
};

SimplifiedSolution solve_vector (const TreeTopology& tree, const ArrivalRates& rates,
                                 const ProtocolParams& params, double l,
                                 const VectorOptions& options = {});

/// T_tx (1 + 2 a_max + ... + (n_c-1) a_max^(n_c-2)) * total_load, the sum of
/// per-node Lipschitz constants of the vector map on [0,a]^N.
double contraction_constant (double total_load_per_symbol, double delta_bar,
                             const ProtocolParams& params);

struct ScalarOptions
{
  double tol = 1e-15;
  int max_iter = 1000000;
  double damping = 0.5;
  std::optional<double> delta_bar;
};

struct ScalarSolution
{
  double tau_bar = 0.0;
  double alpha = 0.0;
  double total_load = 0.0; ///< M = sum_k lambda_k h_k, packets/symbol
  bool converged = false;
  bool unique = false;
  int iterations = 0;
};

/// Solves tau = M (1 + alpha + ... + alpha^(n_c-1)), alpha = T tau/(1 + T tau).
ScalarSolution solve_scalar (double total_load_per_symbol, const ProtocolParams& params,
                             const ScalarOptions& options = {});

/// Closed-form dh/dM of the scalar fixed point h(M).
double scalar_derivative (double total_load_per_symbol, const ProtocolParams& params);

struct Domination
{
  double tau_bar = 0.0;
  double max_tau_minus = 0.0;
  /// (tau_bar - max_i tau_minus_i) / tau_bar; 0 when both vanish.
  double slack = 0.0;
  /// Iterating the vector map from tau_bar produced a coordinatewise
  /// nonincreasing sequence.
  bool monotone_from_top = true;
};

Domination domination_check (const TreeTopology& tree, const ArrivalRates& rates,
                             const ProtocolParams& params, double l, double delta_bar);

/// Pollaczek-Khinchine mean sojourn (symbols) of a node with load nu
/// (packets/symbol) using the low-discard service moments.
double mg1_delay (double nu, double alpha, double gamma, double beta,
                  const ProtocolParams& params);

struct SimplifiedDelays
{
  std::vector<double> sojourn; ///< symbols, by node id
  std::vector<double> rho;
  std::map<NodeId, double> end_to_end_delay; ///< symbols
  std::map<NodeId, double> delivery;
};

/// Per-hop and end-to-end figures for a simplified solution.
/// Throws UnstableQueue if any node has rho >= 1.
SimplifiedDelays simplified_delays (const TreeTopology& tree, const SimplifiedSolution& sol,
                                    const ProtocolParams& params);

} // namespace wsnqos
