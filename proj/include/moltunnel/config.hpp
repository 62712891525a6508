#pragma once

// Run configuration: an INI file with sections [molecule], [barrier],
// [solver] and [run]. Unknown sections or keys are rejected so that a typo
// never silently falls back to a default.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <functional>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "moltunnel/bound_states.hpp"
#include "moltunnel/coupled.hpp"
#include "moltunnel/potentials.hpp"
#include "moltunnel/rigid.hpp"
#include "moltunnel/scatter1d.hpp"
#include "moltunnel/units.hpp"

namespace moltunnel {

/// Malformed or inconsistent configuration.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelSelection { rigid, coupled, single, all };
enum class OutputFormat { csv, json };

inline ModelSelection parse_model(const std::string& s) {
  if (s == "rigid") return ModelSelection::rigid;
  if (s == "coupled") return ModelSelection::coupled;
  if (s == "single") return ModelSelection::single;
  if (s == "all") return ModelSelection::all;
  throw config_error("model must be rigid, coupled, single or all (got '" + s + "')");
}

inline std::string model_name(ModelSelection m) {
  switch (m) {
    case ModelSelection::rigid: return "rigid";
    case ModelSelection::coupled: return "coupled";
    case ModelSelection::single: return "single";
    case ModelSelection::all: return "all";
  }
  return "";
}

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw config_error("format must be csv or json (got '" + s + "')");
}

struct RunConfig {
  MorseParams morse{};
  GaussianBarrierParams barrier{};
  double mass_amu = beryllium_mass_amu;
  double x0 = 2.47;
  int basis_size = 5;
  MorseGrid morse_grid{};
  bool ground_state_average = false;

  SolverSettings solver{};
  CoupledSettings coupled{};

  ModelSelection model = ModelSelection::rigid;
  double energy_min = 1.0;
  double energy_max = 400.0;
  double temperature_min = 20.0;
  double temperature_max = 2500.0;
  int temperature_count = 40;
  double thermal_emax = 2300.0;
  std::size_t max_points = 20000;
  unsigned threads = 1;
  OutputFormat format = OutputFormat::csv;
  std::string output = "moltunnel-out";

  RigidMoleculeSpec rigid_spec() const {
    RigidMoleculeSpec s;
    s.x0 = x0;
    s.barrier = barrier;
    s.mass_amu = mass_amu;
    s.ground_state_average = ground_state_average;
    return s;
  }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0)) throw config_error(std::string(name) + " must be positive");
    };
    positive(morse.U0, "[molecule] U0");
    positive(morse.r_eq, "[molecule] r_eq");
    positive(morse.rho, "[molecule] rho");
    positive(mass_amu, "[molecule] mass_amu");
    positive(x0, "[molecule] x0");
    if (basis_size < 1) throw config_error("[molecule] basis_size must be at least 1");
    positive(morse_grid.step, "[molecule] grid_step");
    if (!(morse_grid.x_max > morse_grid.x_min && morse_grid.x_min >= 0))
      throw config_error("[molecule] need 0 <= grid_min < grid_max");
    positive(barrier.V0, "[barrier] V0");
    positive(barrier.sigma, "[barrier] sigma");
    positive(solver.y_max, "[solver] y_max");
    positive(solver.step, "[solver] step");
    positive(coupled.y_max, "[solver] coupled_y_max");
    positive(coupled.step, "[solver] coupled_step");
    positive(coupled.energy_cap, "[solver] energy_cap");
    positive(energy_min, "[run] energy_min");
    if (!(energy_max > energy_min)) throw config_error("[run] energy_max must exceed energy_min");
    positive(temperature_min, "[run] temperature_min");
    if (!(temperature_max > temperature_min))
      throw config_error("[run] temperature_max must exceed temperature_min");
    if (temperature_count < 2) throw config_error("[run] temperature_count must be at least 2");
    positive(thermal_emax, "[run] thermal_emax");
    if (max_points < 16) throw config_error("[run] max_points must be at least 16");
    if (threads < 1) throw config_error("[run] threads must be at least 1");
  }

  /// Canonical "section.key = value" listing of every field, sorted.
  std::string canonical() const {
    std::map<std::string, std::string> kv;
    auto num = [](double v) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    kv["molecule.U0"] = num(morse.U0);
    kv["molecule.r_eq"] = num(morse.r_eq);
    kv["molecule.rho"] = num(morse.rho);
    kv["molecule.mass_amu"] = num(mass_amu);
    kv["molecule.x0"] = num(x0);
    kv["molecule.basis_size"] = std::to_string(basis_size);
    kv["molecule.grid_min"] = num(morse_grid.x_min);
    kv["molecule.grid_max"] = num(morse_grid.x_max);
    kv["molecule.grid_step"] = num(morse_grid.step);
    kv["molecule.ground_state_average"] = ground_state_average ? "true" : "false";
    kv["barrier.V0"] = num(barrier.V0);
    kv["barrier.sigma"] = num(barrier.sigma);
    kv["solver.y_max"] = num(solver.y_max);
    kv["solver.step"] = num(solver.step);
    kv["solver.method"] =
        solver.method == ScatterMethod::numerov ? "numerov" : "transfer_matrix";
    kv["solver.coupled_y_max"] = num(coupled.y_max);
    kv["solver.coupled_step"] = num(coupled.step);
    kv["solver.energy_cap"] = num(coupled.energy_cap);
    kv["run.model"] = model_name(model);
    kv["run.energy_min"] = num(energy_min);
    kv["run.energy_max"] = num(energy_max);
    kv["run.temperature_min"] = num(temperature_min);
    kv["run.temperature_max"] = num(temperature_max);
    kv["run.temperature_count"] = std::to_string(temperature_count);
    kv["run.thermal_emax"] = num(thermal_emax);
    kv["run.max_points"] = std::to_string(max_points);
    kv["run.format"] = format == OutputFormat::csv ? "csv" : "json";
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
  }

  /// FNV-1a 64-bit hash of the canonical listing, as 16 hex digits. Thread
  /// count and output directory do not change results and are excluded.
  std::string hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical()) {
      h ^= c;
      h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

namespace detail {

inline double to_number(const std::string& section, const std::string& key,
                        const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used == 0 || used != text.size())
    throw config_error("[" + section + "] " + key + ": expected a number, got '" + text + "'");
  return v;
}

inline long to_integer(const std::string& section, const std::string& key,
                       const std::string& text) {
  const double v = to_number(section, key, text);
  if (v != std::floor(v) || std::abs(v) > 1e15)
    throw config_error("[" + section + "] " + key + ": expected an integer, got '" + text + "'");
  return static_cast<long>(v);
}

inline bool to_bool(const std::string& section, const std::string& key,
                    const std::string& text) {
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  throw config_error("[" + section + "] " + key + ": expected true or false, got '" + text + "'");
}

}  // namespace detail

/// Parses INI text. `origin` names the source in diagnostics.
inline RunConfig parse_config(std::istream& in, const std::string& origin = "config") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw config_error(origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig c;
  using Setter = std::function<void(const std::string&)>;
  std::map<std::string, std::map<std::string, Setter>> fields;
  auto number = [](double& dst, const char* sec, const char* key) {
    return Setter([&dst, sec, key](const std::string& t) { dst = detail::to_number(sec, key, t); });
  };
  auto& m = fields["molecule"];
  m["U0"] = number(c.morse.U0, "molecule", "U0");
  m["r_eq"] = number(c.morse.r_eq, "molecule", "r_eq");
  m["rho"] = number(c.morse.rho, "molecule", "rho");
  m["mass_amu"] = number(c.mass_amu, "molecule", "mass_amu");
  m["x0"] = number(c.x0, "molecule", "x0");
  m["grid_min"] = number(c.morse_grid.x_min, "molecule", "grid_min");
  m["grid_max"] = number(c.morse_grid.x_max, "molecule", "grid_max");
  m["grid_step"] = number(c.morse_grid.step, "molecule", "grid_step");
  m["basis_size"] = [&c](const std::string& t) {
    c.basis_size = static_cast<int>(detail::to_integer("molecule", "basis_size", t));
  };
  m["ground_state_average"] = [&c](const std::string& t) {
    c.ground_state_average = detail::to_bool("molecule", "ground_state_average", t);
  };
  auto& b = fields["barrier"];
  b["V0"] = number(c.barrier.V0, "barrier", "V0");
  b["sigma"] = number(c.barrier.sigma, "barrier", "sigma");
  auto& s = fields["solver"];
  s["y_max"] = number(c.solver.y_max, "solver", "y_max");
  s["step"] = number(c.solver.step, "solver", "step");
  s["coupled_y_max"] = number(c.coupled.y_max, "solver", "coupled_y_max");
  s["coupled_step"] = number(c.coupled.step, "solver", "coupled_step");
  s["energy_cap"] = number(c.coupled.energy_cap, "solver", "energy_cap");
  s["method"] = [&c](const std::string& t) {
    if (t == "transfer_matrix")
      c.solver.method = ScatterMethod::transfer_matrix;
    else if (t == "numerov")
      c.solver.method = ScatterMethod::numerov;
    else
      throw config_error("[solver] method: expected transfer_matrix or numerov, got '" + t + "'");
  };
  auto& r = fields["run"];
  r["model"] = [&c](const std::string& t) { c.model = parse_model(t); };
  r["energy_min"] = number(c.energy_min, "run", "energy_min");
  r["energy_max"] = number(c.energy_max, "run", "energy_max");
  r["temperature_min"] = number(c.temperature_min, "run", "temperature_min");
  r["temperature_max"] = number(c.temperature_max, "run", "temperature_max");
  r["temperature_count"] = [&c](const std::string& t) {
    c.temperature_count = static_cast<int>(detail::to_integer("run", "temperature_count", t));
  };
  r["thermal_emax"] = number(c.thermal_emax, "run", "thermal_emax");
  r["max_points"] = [&c](const std::string& t) {
    const long v = detail::to_integer("run", "max_points", t);
    if (v < 0) throw config_error("[run] max_points must be positive");
    c.max_points = static_cast<std::size_t>(v);
  };
  r["threads"] = [&c](const std::string& t) {
    const long v = detail::to_integer("run", "threads", t);
    if (v < 1) throw config_error("[run] threads must be at least 1");
    c.threads = static_cast<unsigned>(v);
  };
  r["format"] = [&c](const std::string& t) { c.format = parse_format(t); };
  r["output"] = [&c](const std::string& t) { c.output = t; };

  for (const auto& [section, body] : tree) {
    const auto sec = fields.find(section);
    if (sec == fields.end()) {
      if (body.empty())
        throw config_error(origin + ": key '" + section + "' outside any section");
      throw config_error(origin + ": unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      const auto f = sec->second.find(key);
      if (f == sec->second.end())
        throw config_error(origin + ": unknown key '" + key + "' in [" + section + "]");
      try {
        f->second(value.data());
      } catch (const config_error& e) {
        throw config_error(origin + ": " + e.what());
      }
    }
  }
  try {
    c.validate();
  } catch (const config_error& e) {
    throw config_error(origin + ": " + e.what());
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

}  // namespace moltunnel
