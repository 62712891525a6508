#pragma once

// Output writers. Tables go to CSV (with '#' metadata lines) or JSON
// ({"meta": ..., "data": ...}); numbers use 17 significant digits so that a
// fixed config reproduces files byte for byte.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "moltunnel/config.hpp"
#include "moltunnel/resonance.hpp"
#include "moltunnel/version.hpp"

namespace moltunnel {

using json = nlohmann::ordered_json;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct OutputMeta {
  std::string command;
  std::string model;
  std::string config_hash;
  std::vector<std::string> notes;
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json meta_json(const OutputMeta& m) {
  json j;
  j["version"] = version;
  j["command"] = m.command;
  j["model"] = m.model;
  j["config_hash"] = m.config_hash;
  j["notes"] = m.notes;
  return j;
}

/// JSON has no NaN; missing values become null.
inline json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline std::string table_csv(const Table& t, const OutputMeta& m) {
  std::string s;
  s += "# moltunnel " + std::string(version) + "\n";
  s += "# command: " + m.command + "\n";
  s += "# model: " + m.model + "\n";
  s += "# config_hash: " + m.config_hash + "\n";
  for (const auto& n : m.notes) s += "# note: " + n + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_number(row[i]);
    s += "\n";
  }
  return s;
}

inline json table_json(const Table& t, const OutputMeta& m) {
  json data = json::array();
  for (const auto& row : t.rows) {
    json r;
    for (std::size_t i = 0; i < t.columns.size(); ++i) r[t.columns[i]] = number_json(row[i]);
    data.push_back(std::move(r));
  }
  json j;
  j["meta"] = meta_json(m);
  j["meta"]["columns"] = t.columns;
  j["data"] = std::move(data);
  return j;
}

inline json record_json(const ResonanceRecord& r) {
  json j;
  j["n"] = r.n;
  j["model"] = r.model;
  j["E_n"] = r.E_n;
  j["E_offset"] = r.E_offset;
  j["gamma_fit"] = number_json(r.gamma_fit);
  j["gamma_formula"] = number_json(r.gamma_formula);
  j["W_peak"] = r.W_peak;
  j["fit_rms"] = number_json(r.fit_rms);
  j["dE"] = r.dE;
  j["spacing"] = r.spacing;
  j["omega"] = r.omega;
  j["fitted"] = r.fitted;
  j["extended_precision"] = r.extended_precision;
  j["even"] = r.even;
  return j;
}

inline json pairing_json(const PairingReport& p, const std::vector<ResonanceRecord>& a,
                         const std::vector<ResonanceRecord>& b) {
  json j;
  json pairs = json::array();
  for (const auto& q : p.pairs)
    pairs.push_back({{"a_n", a[q.a].n},
                     {"b_n", b[q.b].n},
                     {"E_a", a[q.a].E_n},
                     {"E_b", b[q.b].E_n},
                     {"distance", q.distance},
                     {"tolerance", q.tolerance}});
  j["pairs"] = std::move(pairs);
  json ua = json::array(), ub = json::array();
  for (auto i : p.unpaired_a) ua.push_back(a[i].n);
  for (auto i : p.unpaired_b) ub.push_back(b[i].n);
  j["unpaired_a"] = std::move(ua);
  j["unpaired_b"] = std::move(ub);
  j["all_a_paired"] = p.all_a_paired();
  return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

/// Writes `t` as <dir>/<stem>.csv or .json and returns the file name.
inline std::string write_table(const std::filesystem::path& dir, const std::string& stem,
                               const Table& t, const OutputMeta& m, OutputFormat f) {
  const std::string name = stem + (f == OutputFormat::csv ? ".csv" : ".json");
  write_text(dir / name, f == OutputFormat::csv ? table_csv(t, m) : table_json(t, m).dump(2) + "\n");
  return name;
}

/// Run summary written next to the data files.
struct RunReport {
  std::string command;
  std::string config_text;  // canonical listing
  std::string config_hash;
  double wall_seconds = 0.0;
  double max_unitarity_defect = 0.0;
  double max_quadrature_residual = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::string> files;

  json to_json() const {
    json j;
    j["software"] = "moltunnel";
    j["version"] = version;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["config"] = config_text;
    j["wall_seconds"] = wall_seconds;
    j["diagnostics"] = {{"max_unitarity_defect", max_unitarity_defect},
                        {"max_quadrature_residual", max_quadrature_residual}};
    j["warnings"] = warnings;
    j["files"] = files;
    return j;
  }
};

}  // namespace moltunnel
