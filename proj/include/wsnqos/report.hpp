// Tabular experiment reports with JSON and CSV renderings.

#pragma once

#include "wsnqos/bounds.hpp"
#include "wsnqos/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace wsnqos {

using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct Table
{
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Throws if the row width differs from the column count.
  void add_row (std::vector<Cell> row);
};

struct Provenance
{
  std::uint64_t seed = 0;
  std::string param_digest;
  std::string tool_version;
  nlohmann::ordered_json params;
};

struct ExperimentReport
{
  std::string kind;
  Provenance provenance;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, bool>> invariants;
  nlohmann::ordered_json extra; ///< free-form fields appended to the JSON form

  void check (const std::string& name, bool holds) { invariants.emplace_back (name, holds); }
  bool all_hold () const;
};

enum class Format
{
  Json,
  Csv
};

Format format_from_string (const std::string& s);

nlohmann::ordered_json to_json (const ExperimentReport& report);

/// One block per table: a header line, then rows; blocks are separated by a
/// blank line. Numbers use %.10g; text fields are quoted when needed.
std::string to_csv (const ExperimentReport& report);

std::string render (const ExperimentReport& report, Format format);

/// Writes to `path`, or to stdout when path is empty or "-". Returns the
/// number of bytes written; throws std::runtime_error on I/O failure.
std::size_t emit (const ExperimentReport& report, Format format, const std::string& path);

/// Writes raw text with the same destination rules as emit.
std::size_t write_text (const std::string& text, const std::string& path);

std::string csv_escape (const std::string& field);
std::string format_number (double v);

/// 64-bit FNV-1a, lowercase hex.
std::string fnv1a_hex (const std::string& data);

nlohmann::ordered_json params_to_json (const ProtocolParams& params);
ProtocolParams params_from_json (const nlohmann::json& j);

nlohmann::ordered_json qos_to_json (const QosTargets& qos);

/// Digest over the canonical JSON of (params, l, qos).
std::string param_digest (const ProtocolParams& params, double l, const QosTargets& qos);

Provenance make_provenance (std::uint64_t seed, const ProtocolParams& params, double l,
                            const QosTargets& qos);

inline constexpr const char* kToolVersion = "1.0.0";

} // namespace wsnqos
