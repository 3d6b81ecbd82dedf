#include "wsnqos/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace wsnqos {

void
Table::add_row (std::vector<Cell> row)
{
  if (row.size () != columns.size ())
    throw std::invalid_argument ("row width " + std::to_string (row.size ())
                                 + " does not match table '" + name + "'");
  rows.push_back (std::move (row));
}

bool
ExperimentReport::all_hold () const
{
  for (const auto& [name, ok] : invariants)
    if (!ok)
      return false;
  return true;
}

Format
format_from_string (const std::string& s)
{
  if (s == "json")
    return Format::Json;
  if (s == "csv")
    return Format::Csv;
  throw std::invalid_argument ("unknown format '" + s + "' (json, csv)");
}

namespace {

nlohmann::ordered_json
cell_json (const Cell& c)
{
  return std::visit (
    [] (const auto& v) -> nlohmann::ordered_json {
      using T = std::decay_t<decltype (v)>;
      if constexpr (std::is_same_v<T, double>)
        {
          if (!std::isfinite (v))
            return nullptr;
        }
      return v;
    },
    c);
}

std::string
cell_text (const Cell& c)
{
  return std::visit (
    [] (const auto& v) -> std::string {
      using T = std::decay_t<decltype (v)>;
      if constexpr (std::is_same_v<T, std::string>)
        return csv_escape (v);
      else if constexpr (std::is_same_v<T, double>)
        return format_number (v);
      else if constexpr (std::is_same_v<T, bool>)
        return v ? "true" : "false";
      else
        return std::to_string (v);
    },
    c);
}

} // namespace

std::string
format_number (double v)
{
  if (std::isnan (v))
    return "nan";
  if (std::isinf (v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf (buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string
csv_escape (const std::string& field)
{
  if (field.find_first_of (",\"\r\n") == std::string::npos)
    return field;
  std::string out = "\"";
  for (char c : field)
    {
      if (c == '"')
        out += '"';
      out += c;
    }
  out += '"';
  return out;
}

nlohmann::ordered_json
to_json (const ExperimentReport& report)
{
  nlohmann::ordered_json j;
  j["kind"] = report.kind;
  j["provenance"] = {{"seed", report.provenance.seed},
                     {"param_digest", report.provenance.param_digest},
                     {"tool_version", report.provenance.tool_version},
                     {"params", report.provenance.params}};
  nlohmann::ordered_json tables = nlohmann::ordered_json::array ();
  for (const Table& t : report.tables)
    {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array ();
      for (const auto& r : t.rows)
        {
          nlohmann::ordered_json row;
          for (std::size_t i = 0; i < r.size (); ++i)
            row[t.columns[i]] = cell_json (r[i]);
          rows.push_back (row);
        }
      tables.push_back ({{"name", t.name}, {"columns", t.columns}, {"rows", rows}});
    }
  j["tables"] = tables;
  nlohmann::ordered_json inv = nlohmann::ordered_json::object ();
  for (const auto& [name, ok] : report.invariants)
    inv[name] = ok;
  j["invariants"] = inv;
  j["ok"] = report.all_hold ();
  if (!report.extra.is_null ())
    for (const auto& [k, v] : report.extra.items ())
      j[k] = v;
  return j;
}

std::string
to_csv (const ExperimentReport& report)
{
  std::ostringstream out;
  bool first = true;
  for (const Table& t : report.tables)
    {
      if (!first)
        out << "\r\n";
      first = false;
      out << "table";
      for (const auto& c : t.columns)
        out << ',' << csv_escape (c);
      out << "\r\n";
      for (const auto& r : t.rows)
        {
          out << csv_escape (t.name);
          for (const Cell& c : r)
            out << ',' << cell_text (c);
          out << "\r\n";
        }
    }
  return out.str ();
}

std::string
render (const ExperimentReport& report, Format format)
{
  if (format == Format::Json)
    return to_json (report).dump (2) + "\n";
  return to_csv (report);
}

std::size_t
write_text (const std::string& text, const std::string& path)
{
  if (path.empty () || path == "-")
    {
      std::cout << text << std::flush;
      if (!std::cout)
        throw std::runtime_error ("failed to write to stdout");
      return text.size ();
    }
  std::ofstream f (path, std::ios::binary);
  if (!f)
    throw std::runtime_error ("cannot open '" + path + "' for writing");
  f << text;
  f.close ();
  if (!f)
    throw std::runtime_error ("failed writing '" + path + "'");
  return text.size ();
}

std::size_t
emit (const ExperimentReport& report, Format format, const std::string& path)
{
  return write_text (render (report, format), path);
}

std::string
fnv1a_hex (const std::string& data)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data)
    {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  char buf[17];
  std::snprintf (buf, sizeof buf, "%016llx", static_cast<unsigned long long> (h));
  return buf;
}

nlohmann::ordered_json
params_to_json (const ProtocolParams& p)
{
  return {{"n_c", p.n_c},
          {"n_t", p.n_t},
          {"be_min", p.be_min},
          {"be_max", p.be_max},
          {"slot_symbols", p.slot_symbols},
          {"cca_symbols", p.cca_symbols},
          {"turnaround_symbols", p.turnaround_symbols},
          {"ack_symbols", p.ack_symbols},
          {"symbol_seconds", p.symbol_seconds},
          {"packet_bytes", p.packet_bytes}};
}

ProtocolParams
params_from_json (const nlohmann::json& j)
{
  ProtocolParams p;
  p.n_c = j.value ("n_c", p.n_c);
  p.n_t = j.value ("n_t", p.n_t);
  p.be_min = j.value ("be_min", p.be_min);
  p.be_max = j.value ("be_max", p.be_max);
  p.slot_symbols = j.value ("slot_symbols", p.slot_symbols);
  p.cca_symbols = j.value ("cca_symbols", p.cca_symbols);
  p.turnaround_symbols = j.value ("turnaround_symbols", p.turnaround_symbols);
  p.ack_symbols = j.value ("ack_symbols", p.ack_symbols);
  p.symbol_seconds = j.value ("symbol_seconds", p.symbol_seconds);
  p.packet_bytes = j.value ("packet_bytes", p.packet_bytes);
  p.validate ();
  return p;
}

nlohmann::ordered_json
qos_to_json (const QosTargets& q)
{
  return {{"p_del", q.p_del},
          {"d_max", q.d_max},
          {"h_max", q.h_max},
          {"delta_bar", q.delta_bar},
          {"d_bar", q.d_bar}};
}

std::string
param_digest (const ProtocolParams& params, double l, const QosTargets& qos)
{
  nlohmann::ordered_json j{{"params", params_to_json (params)}, {"l", l}, {"qos", qos_to_json (qos)}};
  return fnv1a_hex (j.dump ());
}

Provenance
make_provenance (std::uint64_t seed, const ProtocolParams& params, double l, const QosTargets& qos)
{
  Provenance p;
  p.seed = seed;
  p.param_digest = param_digest (params, l, qos);
  p.tool_version = kToolVersion;
  p.params = {{"protocol", params_to_json (params)}, {"l", l}, {"qos", qos_to_json (qos)}};
  return p;
}

} // namespace wsnqos
