// Random scenario generation and the validation / sensitivity studies run
// over generated scenarios.

#pragma once

#include "wsnqos/bounds.hpp"
#include "wsnqos/designer.hpp"
#include "wsnqos/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wsnqos {

struct ScenarioConfig
{
  int sources = 10;
  int relays = 30;
  double side = 150.0;  ///< meters; sink at the (0,0) corner
  double radius = 40.0; ///< link admissibility range, meters
  double per = 0.02;
  int h_max = 5;
  int n_max = 4;
  int restarts = 10;
  int max_attempts = 1000;
  /// Redraw until a hop-feasible tree within the relay budget exists.
  bool require_feasible = true;
};

struct Scenario
{
  NetworkGraph graph;
  std::uint64_t seed = 0;     ///< requested seed
  std::uint64_t sub_seed = 0; ///< seed of the accepted draw
  int attempt = 0;
  ScenarioConfig config;
  bool connected = false;
  bool feasible = false;
  TreeTopology tree; ///< budgeted Steiner tree (best effort when infeasible)
};

/// Draws node positions from sub-seeds of `seed` until the instance is
/// connected (and feasible when required). Throws ModelError after
/// max_attempts draws.
Scenario generate_scenario (std::uint64_t seed, const ScenarioConfig& config = {});

/// Scenario k uses seed + k.
std::vector<Scenario> generate_scenarios (std::uint64_t seed, int count,
                                          const ScenarioConfig& config = {});

/// (sum x)^2 / (N sum x^2). Throws on empty, negative or all-zero input.
double jain_fairness (const std::vector<double>& x);

struct StudyConfig
{
  ProtocolParams params;
  double l = 0.02;
  QosTargets qos = split_qos (0.9, 0.1, 5);
  /// Equal source rates as fractions of B1 / total hops.
  std::vector<double> fractions{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
};

/// Equal per-source rate at which the total load reaches B1 on this tree.
double uniqueness_rate (const TreeTopology& tree, const StudyConfig& cfg);

struct AccuracyRow
{
  std::size_t scenario = 0;
  std::uint64_t seed = 0;
  int nodes = 0;
  int total_hops = 0;
  double tau_err_pct = 0.0;
  /// Absolute error in max delta over rates where the detailed max delta <= 0.002.
  double delta_abs_err = 0.0;
  /// Percentage error over the remaining rates (NaN when there are none).
  double delta_pct_err = 0.0;
  double delivery_err_pct = 0.0;
  double delay_err_pct = 0.0;
  int points = 0;
  int unconverged = 0;
};

std::vector<AccuracyRow> validate_accuracy (const std::vector<Scenario>& scenarios,
                                            const StudyConfig& cfg);

struct SlackRow
{
  std::size_t scenario = 0;
  std::uint64_t seed = 0;
  int nodes = 0;
  int total_hops = 0;
  double worst_slack_pct = 0.0;
  double least_slack_pct = 0.0;
  bool domination = true;
  bool monotone = true;
};

std::vector<SlackRow> validate_slackness (const std::vector<Scenario>& scenarios,
                                          const StudyConfig& cfg);

struct FairnessRow
{
  std::size_t scenario = 0;
  std::uint64_t seed = 0;
  int nodes = 0;
  double worst_index = 1.0;
  double worst_rate = 0.0;
};

/// Jain index of the detailed tau_minus vector at each rate (packets/s).
std::vector<FairnessRow> fairness_study (const std::vector<Scenario>& scenarios,
                                         const StudyConfig& cfg, const std::vector<double>& rates);

/// {0.001, 0.5, 1.0, ..., 4.0}
std::vector<double> default_fairness_rates ();

struct SweepRow
{
  std::string parameter;
  int value = 0;
  double b1 = 0.0;
  double b2 = 0.0;
  double b = 0.0;
  double b_prime = 0.0;
};

/// Bounds as one protocol parameter varies, the rest at cfg.params.
/// Varying be_min moves be_max with it so the window span stays fixed.
std::vector<SweepRow> sensitivity_sweep (const std::string& which, const std::vector<int>& values,
                                         const StudyConfig& cfg);

struct PerturbationResult
{
  std::vector<std::pair<NodeId, double>> rates; ///< packets/s
  double lambda_hat = 0.0;
  double mean_rate = 0.0;
  double max_delta = 0.0;
  double max_hop_delay = 0.0; ///< seconds
  bool converged = false;
  bool discard_ok = false;
  bool delay_ok = false;
  double discard_excess_pct = 0.0; ///< relative excess over delta_bar, 0 if met
};

/// Half of the sources (a seeded shuffle; floor for the raised half) get
/// lambda_hat plus a draw from {0.01..0.05}, the rest minus one.
PerturbationResult perturbation_study (const TreeTopology& tree, double lambda_hat,
                                       std::uint64_t seed, const StudyConfig& cfg,
                                       bool zero_perturbation = false);

struct OptimalityRow
{
  std::size_t scenario = 0;
  std::uint64_t seed = 0;
  int spt_relays = 0;
  int spt_hops = 0;
  std::size_t candidates = 0;
  double spt_inner = 0.0;
  double spt_searched = 0.0;
  double best_inner = 0.0;    ///< over non-SPT candidates
  double best_searched = 0.0; ///< over all candidates
  int inner_violations = 0;   ///< candidates with a larger lambda tilde than the SPT
  int searched_violations = 0;
  int sandwich_violations = 0; ///< candidates with lambda tilde > lambda hat
  double min_ratio = 1.0;      ///< min lambda tilde / lambda hat
  int monotonicity_violations = 0;
};

OptimalityRow optimality_study (const Scenario& scenario, std::size_t index, const StudyConfig& cfg,
                                Layer layer, double step);

} // namespace wsnqos
