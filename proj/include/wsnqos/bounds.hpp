// QoS splitting, hop limits, the explicit throughput bounds and membership
// tests for the resulting inner regions.
//
// Bound values (b1, b2, b, b_prime) are in packets/second; tau_max and a are
// per symbol; s_bar is in symbols.

#pragma once

#include "wsnqos/model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wsnqos {

/// Raised when a QoS target cannot be met by any positive load.
class InfeasibleTarget : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

struct QosTargets
{
  double p_del = 0.9;
  double d_max = 0.1; ///< seconds, end to end
  int h_max = 5;
  double delta_bar = 0.0;
  double d_bar = 0.0; ///< seconds, per link
};

/// Splits end-to-end targets equally over h_max links.
QosTargets split_qos (double p_del, double d_max_seconds, int h_max);

struct HopLimits
{
  std::int64_t h_delay = 0;
  std::int64_t h_delivery = 0;
  std::int64_t h_no_hidden = 0;
  std::int64_t h_bar = 0;
  double single_hop_delay = 0.0;   ///< seconds, lone packet
  double lone_packet_discard = 0.0; ///< l^(n_t+1)
};

/// Mean single-hop delay of a packet that never contends: expected attempts
/// sum_{j<n_t} l^j, each costing the first backoff stage, two turnarounds,
/// the frame and the ACK. Symbols.
double lone_packet_delay (const ProtocolParams& params, double l);

HopLimits hop_limits (const ProtocolParams& params, double l, double d_max_seconds, double p_del,
                      double r_cs, double r);

/// delta_bar^(1/n_c)
double alpha_max (double delta_bar, const ProtocolParams& params);

/// a = alpha_max / (T_tx (1 - alpha_max)), per symbol.
double attempt_cap (double delta_bar, const ProtocolParams& params);

/// Largest perceived attempt rate keeping the discard probability within
/// delta_bar (capped at a). Throws InfeasibleTarget if delta_bar <= l^n_t.
double tau_max (double delta_bar, double l, const ProtocolParams& params);

double bound_b1 (double delta_bar, const ProtocolParams& params);
double bound_b2 (double delta_bar, double l, const ProtocolParams& params);
double bound_b (double delta_bar, double l, const ProtocolParams& params);

/// Per-node load bound for the per-link delay target d_bar (seconds).
/// Throws InfeasibleTarget when d_bar does not exceed the mean service time
/// at tau_max.
double bound_bprime (double delta_bar, double d_bar_seconds, double l, const ProtocolParams& params);

/// Mean service time (symbols) and its squared coefficient of variation at
/// tau_max, as used by bound_bprime.
struct ServiceEnvelope
{
  double s_bar = 0.0;
  double cs2_bar = 0.0;
};
ServiceEnvelope service_envelope (double delta_bar, double l, const ProtocolParams& params);

struct ThroughputBounds
{
  double delta_bar = 0.0;
  double d_bar = 0.0; ///< seconds
  double alpha_max = 0.0;
  double a = 0.0;
  double tau_max = 0.0;
  bool tau_capped = false; ///< tau_max hit a rather than the discard root
  double b1 = 0.0;
  double b2 = 0.0;
  double b = 0.0;
  double b_prime = 0.0; ///< 0 when the delay target is infeasible
  bool delay_feasible = true;
  double s_bar = 0.0;
  double cs2_bar = 0.0;
};

ThroughputBounds compute_bounds (double delta_bar, double d_bar_seconds, double l,
                                 const ProtocolParams& params);

struct Membership
{
  bool member = false;
  double total_load = 0.0; ///< sum lambda_k h_k, packets/second
  double max_node_load = 0.0;
  std::string reason;
  explicit operator bool () const { return member; }
};

/// sum_k lambda_k h_k < B (strict).
Membership member_delta (const TreeTopology& tree, const ArrivalRates& rates,
                         const ThroughputBounds& bounds);

/// Adds max_i nu_i <= B' (non-strict).
Membership member_delta_delay (const TreeTopology& tree, const ArrivalRates& rates,
                               const ThroughputBounds& bounds);

/// min(B / sum_k h_k, B' / max_i m_i), packets/second.
double equal_rate_inner_throughput (const TreeTopology& tree, const ThroughputBounds& bounds);

} // namespace wsnqos
