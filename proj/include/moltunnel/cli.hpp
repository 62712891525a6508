#pragma once

// Command-line front end. run_cli() parses arguments, runs one command and
// returns the process exit code:
//   0 success, 2 configuration or domain error, 3 solver accuracy or
//   convergence failure, 4 point budget exhausted, 1 anything else.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "moltunnel/bound_states.hpp"
#include "moltunnel/config.hpp"
#include "moltunnel/coupled.hpp"
#include "moltunnel/io.hpp"
#include "moltunnel/resonance.hpp"
#include "moltunnel/rigid.hpp"
#include "moltunnel/thermal.hpp"

namespace moltunnel::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_config = 2,
  exit_accuracy = 3,
  exit_budget = 4,
};

/// Thread-safe running maximum.
class MaxTracker {
 public:
  void update(double v) {
    std::lock_guard<std::mutex> lock(m_);
    if (v > max_) max_ = v;
  }
  double value() const {
    std::lock_guard<std::mutex> lock(m_);
    return max_;
  }

 private:
  mutable std::mutex m_;
  double max_ = 0.0;
};

inline RigidMolecule make_rigid(const RunConfig& c) {
  RigidMoleculeSpec spec = c.rigid_spec();
  if (spec.ground_state_average) {
    auto states = morse_wavefunctions(c.morse, KineticCoefficient::relative(c.mass_amu),
                                      c.morse_grid, 1);
    spec.ground_state = states.front();
  }
  return RigidMolecule(spec, c.solver);
}

inline CoupledSolver make_coupled(const RunConfig& c) {
  return CoupledSolver(ChannelBasis::morse(c.morse, c.mass_amu, c.basis_size, c.morse_grid),
                       c.barrier, c.coupled);
}

inline std::vector<ModelSelection> expand(ModelSelection m) {
  if (m == ModelSelection::all)
    return {ModelSelection::single, ModelSelection::rigid, ModelSelection::coupled};
  return {m};
}

struct Context {
  RunConfig config;
  std::filesystem::path dir;
  RunReport report;
  bool budget_hit = false;

  OutputMeta meta(const std::string& model, std::vector<std::string> notes = {}) const {
    return {report.command, model, config.hash(), std::move(notes)};
  }
  void emit_table(const std::string& stem, const Table& t, const OutputMeta& m) {
    report.files.push_back(write_table(dir, stem, t, m, config.format));
  }
  void emit_json(const std::string& stem, const json& j) {
    const std::string name = stem + ".json";
    write_text(dir / name, j.dump(2) + "\n");
    report.files.push_back(name);
  }
};

inline void cmd_levels(Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto kin = KineticCoefficient::relative(c.mass_amu);
  const auto analytic = morse_levels(c.morse, kin);
  const auto numeric = morse_wavefunctions(c.morse, kin, c.morse_grid);
  Table t{{"n", "analytic_K", "numeric_K", "difference_K"}, {}};
  if (analytic.empty()) std::printf("no bound states (lambda <= 1/2)\n");
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double num = numeric.at(i).energy;
    t.rows.push_back({static_cast<double>(i + 1), analytic[i], num, num - analytic[i]});
    std::printf("%3zu  %14.6f  %14.6f  %+.3e\n", i + 1, analytic[i], num, num - analytic[i]);
  }
  ctx.emit_table("levels", t, ctx.meta("morse"));
}

inline void cmd_transmit(Context& ctx) {
  const RunConfig& c = ctx.config;
  const RigidMolecule rm = make_rigid(c);
  std::optional<CoupledSolver> cs;
  ScanOptions so;
  so.max_points = c.max_points;
  so.threads = c.threads;
  ResonanceOptions ro;
  ro.threads = c.threads;
  for (ModelSelection m : expand(c.model)) {
    MaxTracker defect;
    std::function<double(double)> w;
    std::vector<ScanPoint> seeds;
    if (m == ModelSelection::single) {
      w = [&](double e) {
        const auto a = rm.single().amplitudes(e);
        defect.update(a.unitarity_defect());
        return a.W;
      };
    } else if (m == ModelSelection::rigid) {
      w = [&](double e) {
        const auto a = rm.amplitudes(e);
        defect.update(a.unitarity_defect());
        return a.W;
      };
      // Resonances narrower than double-precision spacing cannot be hit by
      // bisection; insert the refined peaks.
      for (const auto& r : locate_resonances_rigid(rm, c.energy_min, c.energy_max, ro).records)
        seeds.push_back({r.E_n, r.W_peak});
    } else {
      if (c.energy_max > c.coupled.energy_cap)
        throw config_error("[run] energy_max exceeds the coupled solver cap [solver] energy_cap");
      if (!cs) cs.emplace(make_coupled(c));
      w = [&](double e) {
        const auto r = cs->solve(e);
        defect.update(unitarity_defect(r));
        return r.W;
      };
      for (const auto& r : locate_resonances_coupled(*cs, rm, c.energy_min, c.energy_max, ro))
        seeds.push_back({r.E_n, r.W_peak});
    }
    const std::string name = model_name(m);
    const ScanCurve curve = adaptive_scan(w, c.energy_min, c.energy_max, name, so, seeds);
    Table t{{"E_K", "W", "envelope"}, {}};
    for (const auto& p : curve.points) {
      const double om = rm.omega(p.E);
      t.rows.push_back({p.E, p.W, 0.25 * om * om});
    }
    std::vector<std::string> notes{"envelope = omega(E)^2/4, omega from one barrier"};
    if (curve.incomplete) {
      notes.push_back("point budget exhausted; curve incomplete");
      ctx.report.warnings.push_back(name + ": point budget exhausted");
      ctx.budget_hit = true;
    }
    ctx.report.max_unitarity_defect = std::max(ctx.report.max_unitarity_defect, defect.value());
    ctx.emit_table("transmit-" + name, t, ctx.meta(name, notes));
    std::printf("%s: %zu samples, %zu peaks with W >= 0.5\n", name.c_str(), curve.points.size(),
                scan_peaks(curve).size());
  }
}

inline void cmd_resonances(Context& ctx) {
  const RunConfig& c = ctx.config;
  if (c.model == ModelSelection::single)
    throw config_error("resonances: a single barrier has no resonances; use rigid, coupled or all");
  const RigidMolecule rm = make_rigid(c);
  ResonanceOptions ro;
  ro.threads = c.threads;
  std::vector<ResonanceRecord> rigid, coupled;
  const bool want_rigid = c.model != ModelSelection::coupled;
  const bool want_coupled = c.model != ModelSelection::rigid;
  if (want_rigid) rigid = locate_resonances_rigid(rm, c.energy_min, c.energy_max, ro).records;
  if (want_coupled) {
    if (c.energy_max > c.coupled.energy_cap)
      throw config_error("[run] energy_max exceeds the coupled solver cap [solver] energy_cap");
    const CoupledSolver cs = make_coupled(c);
    coupled = locate_resonances_coupled(cs, rm, c.energy_min, c.energy_max, ro);
  }
  json data;
  if (want_rigid) {
    json a = json::array();
    for (const auto& r : rigid) a.push_back(record_json(r));
    data["rigid"] = std::move(a);
  }
  if (want_coupled) {
    json a = json::array();
    for (const auto& r : coupled) a.push_back(record_json(r));
    data["coupled"] = std::move(a);
  }
  if (want_rigid && want_coupled) {
    const PairingReport p = match_catalogs(rigid, coupled);
    data["pairing"] = pairing_json(p, rigid, coupled);
    if (!p.all_a_paired())
      ctx.report.warnings.push_back(std::to_string(p.unpaired_a.size()) +
                                    " rigid resonance(s) without a coupled partner");
  }
  json j;
  j["meta"] = meta_json(ctx.meta(model_name(c.model)));
  j["data"] = std::move(data);
  ctx.emit_json("resonances-" + model_name(c.model), j);
  for (const auto* cat : {&rigid, &coupled})
    for (const auto& r : *cat)
      std::printf("%-8s n=%2d  E=%.6f K  gamma=%.3e K  W_peak=%.6f\n", r.model.c_str(), r.n,
                  r.E_n, r.gamma_fit, r.W_peak);
}

inline std::vector<double> temperature_grid(const RunConfig& c) {
  return log_grid(c.temperature_min, c.temperature_max, c.temperature_count);
}

inline void cmd_thermal(Context& ctx) {
  const RunConfig& c = ctx.config;
  const RigidMolecule rm = make_rigid(c);
  ThermalOptions to;
  to.E_max = c.thermal_emax;
  to.T_min = c.temperature_min;
  to.threads = c.threads;
  const ThermalModel model(rm, to);
  const auto temps = temperature_grid(c);
  std::vector<ThermalCurve> curves;
  std::vector<std::string> notes;
  auto add = [&](const EnergyRule& rule, ThermalVariant v) {
    ctx.report.max_quadrature_residual =
        std::max(ctx.report.max_quadrature_residual, rule.relative_residual());
    curves.push_back(model.evaluate(rule, v, temps));
  };
  const bool all = c.model == ModelSelection::all;
  if (all || c.model == ModelSelection::coupled) {
    const CoupledSolver cs = make_coupled(c);
    add(model.molecule_rule(cs, &notes), ThermalVariant::molecule);
  }
  if (all || c.model == ModelSelection::rigid) add(model.rigid_rule(&notes), ThermalVariant::rigid);
  if (all || c.model == ModelSelection::single) add(model.smooth_rule(), ThermalVariant::smooth);
  curves.push_back(model.arrhenius_curve(temps));
  Table t;
  t.columns.push_back("T_K");
  for (const auto& cv : curves) t.columns.push_back(variant_name(cv.variant));
  for (std::size_t i = 0; i < temps.size(); ++i) {
    std::vector<double> row{temps[i]};
    for (const auto& cv : curves) row.push_back(cv.F[i]);
    t.rows.push_back(std::move(row));
  }
  notes.push_back("E_max = " + format_number(c.thermal_emax) + " K; tail exp(-E_max/T) added");
  ctx.emit_table("thermal-" + model_name(c.model), t, ctx.meta(model_name(c.model), notes));
  std::printf("thermal: %zu temperatures, %zu curves\n", temps.size(), curves.size());
}

inline void cmd_arrhenius(Context& ctx) {
  const RunConfig& c = ctx.config;
  Table t{{"T_K", "arrhenius"}, {}};
  for (double T : temperature_grid(c)) t.rows.push_back({T, arrhenius(T, c.barrier.V0)});
  ctx.emit_table("arrhenius", t, ctx.meta("arrhenius"));
}

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Resonant tunnelling of a diatomic molecule through a repulsive barrier"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1, 1);
  std::string config_path, output, format, model;
  double emax = 0;
  unsigned threads = 0;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--output", output, "output directory");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--model", model, "rigid, coupled, single or all")
      ->check(CLI::IsMember({"rigid", "coupled", "single", "all"}));
  app.add_option("--emax", emax,
                 "upper energy in K (thermal: integration cut-off; otherwise energy_max)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"levels", "Morse vibrational levels, analytic and numeric"},
      {"transmit", "transmission curve W(E) with the omega^2/4 envelope"},
      {"resonances", "resonance catalog, with pairing when both models run"},
      {"thermal", "resonance-averaged thermal functions F(T)"},
      {"arrhenius", "Arrhenius factor exp(-V0/T)"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  const auto start = std::chrono::steady_clock::now();
  Context ctx;
  try {
    ctx.config = config_path.empty() ? RunConfig{} : load_config(config_path);
    RunConfig& c = ctx.config;
    if (!output.empty()) c.output = output;
    if (!format.empty()) c.format = parse_format(format);
    if (!model.empty()) c.model = parse_model(model);
    if (threads > 0) c.threads = threads;
    if (emax > 0) {
      if (command == "thermal")
        c.thermal_emax = emax;
      else
        c.energy_max = emax;
    } else if (app.count("--emax")) {
      throw config_error("--emax must be positive");
    }
    c.validate();
    ctx.dir = c.output;
    std::filesystem::create_directories(ctx.dir);
    ctx.report.command = command;
    ctx.report.config_text = c.canonical();
    ctx.report.config_hash = c.hash();
    if (command == "levels") cmd_levels(ctx);
    else if (command == "transmit") cmd_transmit(ctx);
    else if (command == "resonances") cmd_resonances(ctx);
    else if (command == "thermal") cmd_thermal(ctx);
    else cmd_arrhenius(ctx);
    ctx.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text(ctx.dir / (command + "-report.json"), ctx.report.to_json().dump(2) + "\n");
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const domain_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return exit_config;
  } catch (const unsupported_input& e) {
    std::cerr << "unsupported input: " << e.what() << "\n";
    return exit_config;
  } catch (const accuracy_error& e) {
    std::cerr << "accuracy error: " << e.what() << " (defect " << e.defect() << ")\n";
    return exit_accuracy;
  } catch (const convergence_error& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return exit_accuracy;
  } catch (const budget_exhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return exit_budget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
  for (const auto& w : ctx.report.warnings) std::cerr << "warning: " << w << "\n";
  return ctx.budget_hit ? exit_budget : exit_ok;
}

}  // namespace moltunnel::cli
