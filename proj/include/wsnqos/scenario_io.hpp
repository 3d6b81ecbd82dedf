// Scenario files and analysis reports in JSON.
//
// Scenario format 1:
//   { "format": 1, "seed": 7 (optional),
//     "nodes": [{"id", "kind", "x", "y"}], "edges": [{"a", "b", "per"}],
//     "l": 0.02, "params": {...}, "qos": {...},
//     "tree": {"parent": [-1, ...]} (optional),
//     "rates": {"1": 2.5, ...} (optional, packets/s) }

#pragma once

#include "wsnqos/bounds.hpp"
#include "wsnqos/detailed.hpp"
#include "wsnqos/model.hpp"
#include "wsnqos/simplified.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace wsnqos {

inline constexpr int kScenarioFormat = 1;

struct ScenarioFile
{
  NetworkGraph graph;
  ProtocolParams params;
  double l = 0.02;
  QosTargets qos = split_qos (0.9, 0.1, 5);
  std::optional<TreeTopology> tree;
  std::optional<ArrivalRates> rates;
  std::optional<std::uint64_t> seed;
};

nlohmann::ordered_json scenario_to_json (const ScenarioFile& s);

/// Throws ModelError on schema or model violations.
ScenarioFile scenario_from_json (const nlohmann::json& j);

ScenarioFile load_scenario (const std::string& path);

nlohmann::ordered_json tree_to_json (const TreeTopology& tree);
TreeTopology tree_from_json (const nlohmann::json& j, const NetworkGraph& graph);

/// Per-node state, per-source end-to-end metrics and convergence metadata.
/// Times in the report are seconds, rates packets/second.
nlohmann::ordered_json detailed_report (const TreeTopology& tree, const DetailedSolution& sol,
                                        const QnaResult* qna, const ProtocolParams& params);

nlohmann::ordered_json simplified_report (const TreeTopology& tree, const SimplifiedSolution& sol,
                                          const SimplifiedDelays* delays,
                                          const ProtocolParams& params);

nlohmann::ordered_json bounds_to_json (const ThroughputBounds& b);

} // namespace wsnqos
