#pragma once

// Boltzmann-averaged transmission
//   F(T) = beta * integral_0^Emax e^{-beta E} W(E) dE + e^{-beta Emax}.
// Every variant is reduced once to a temperature-independent set of
// quadrature nodes (E_k, w_k, W_k) plus point masses for resonances too narrow
// to integrate, so a whole temperature grid costs one set of solves.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "moltunnel/coupled.hpp"
#include "moltunnel/errors.hpp"
#include "moltunnel/parallel.hpp"
#include "moltunnel/resonance.hpp"
#include "moltunnel/rigid.hpp"

namespace moltunnel {

inline double arrhenius(double T, double V0) {
  if (!(T > 0)) throw domain_error("arrhenius: T must be positive");
  return std::exp(-V0 / T);
}

/// Closed form of the integral of the double-barrier transmission over one
/// period of the phase, 2 pi omega / (2 - omega).
inline double kernel_closed_form(double omega) {
  if (!(omega > 0 && omega <= 1)) throw domain_error("kernel: omega must lie in (0, 1]");
  return 2.0 * std::numbers::pi * omega / (2.0 - omega);
}

/// Quadrature of wrm_analytic(omega, S) over [-pi, pi]: Gauss-Legendre on
/// panels whose widths grow geometrically away from the peak at S = 0 (width
/// ~omega). The error estimate is the change from 20 to 30 nodes per panel.
inline double kernel_quadrature(double omega, double* error = nullptr) {
  using boost::math::quadrature::gauss;
  auto g = [omega](double s) { return wrm_analytic(omega, s); };
  std::vector<double> cuts{0.0};
  for (double w = std::max(omega, 1e-12); w < std::numbers::pi; w *= 4) cuts.push_back(w);
  cuts.push_back(std::numbers::pi);
  double fine = 0, coarse = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    fine += 2.0 * gauss<double, 30>::integrate(g, cuts[i], cuts[i + 1]);
    coarse += 2.0 * gauss<double, 20>::integrate(g, cuts[i], cuts[i + 1]);
  }
  if (error) *error = std::abs(fine - coarse);
  return fine;
}

/// Weight function f(E) and the energy scale on which it varies.
struct SmoothWeight {
  std::function<double(double)> f;
  double scale = 0.0;
};

inline SmoothWeight boltzmann_weight(double T) {
  if (!(T > 0)) throw domain_error("boltzmann_weight: T must be positive");
  const double beta = 1.0 / T;
  return {[beta](double e) { return beta * std::exp(-beta * e); }, T};
}

/// Sum over resonance cells of f(E_n) dE_n omega(E_n) / (2 - omega(E_n)), with
/// dE_n the distance between the minima on either side of E_n.
inline double resonance_integral(const SmoothWeight& f, const ResonanceLadder& ladder,
                                 const std::function<double(double)>& omega_fn) {
  if (ladder.positions.size() < 2 || ladder.minima.size() < ladder.positions.size() + 1)
    throw domain_error("resonance_integral: need at least two resonances");
  double sum = 0;
  for (std::size_t n = 0; n < ladder.positions.size(); ++n) {
    const double e = ladder.positions[n];
    const double de = ladder.minima[n + 1] - ladder.minima[n];
    const double w = omega_fn(e);
    sum += f.f(e) * de * w / (2.0 - w);
  }
  return sum;
}

/// integral_{lo}^{hi} f(E) omega(E)/(2 - omega(E)) dE by adaptive quadrature.
inline double smooth_equivalent(const SmoothWeight& f,
                                const std::function<double(double)>& omega_fn,
                                double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  if (!(hi > lo)) throw domain_error("smooth_equivalent: empty range");
  auto g = [&](double e) {
    const double w = omega_fn(e);
    return f.f(e) * w / (2.0 - w);
  };
  // Panels no wider than the weight scale keep each piece smooth.
  const double width = std::max(f.scale, 1e-6 * (hi - lo));
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
  double sum = 0, err = 0;
  for (int i = 0; i < panels; ++i) {
    const double a = lo + (hi - lo) * i / panels, b = lo + (hi - lo) * (i + 1) / panels;
    double e = 0;
    sum += gauss_kronrod<double, 31>::integrate(g, a, b, 15, 1e-10, &e);
    err += e;
  }
  if (!(err <= 1e-6 * std::abs(sum) + 1e-300))
    throw accuracy_error("smooth_equivalent: quadrature did not converge", err);
  return sum;
}

/// Temperature-independent quadrature rule for integral g(E) f(E) dE.
class EnergyRule {
 public:
  /// Adaptive GK15 panels on [a, b]: a panel is split while the Kronrod and
  /// embedded Gauss estimates differ by more than rel_tol, or while it is
  /// wider than max_width.
  void add_adaptive(const std::function<double(double)>& g, double a, double b,
                    double max_width, double rel_tol = 1e-8, int max_depth = 40,
                    unsigned threads = 1) {
    if (!(b > a)) return;
    std::vector<std::pair<double, double>> todo;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    for (int i = 0; i < pieces; ++i)
      todo.emplace_back(a + (b - a) * i / pieces, a + (b - a) * (i + 1) / pieces);
    for (int depth = 0; !todo.empty(); ++depth) {
      std::vector<Panel> done(todo.size());
      parallel_for(todo.size(), threads,
                   [&](std::size_t i) { done[i] = panel(g, todo[i].first, todo[i].second); });
      std::vector<std::pair<double, double>> next;
      for (std::size_t i = 0; i < todo.size(); ++i) {
        const Panel& p = done[i];
        const double scale = std::max(std::abs(p.kronrod), 1e-300);
        if (std::abs(p.kronrod - p.gauss) > rel_tol * scale && depth < max_depth &&
            p.b - p.a > 1e-13 * std::max(1.0, std::abs(p.a))) {
          const double m = 0.5 * (p.a + p.b);
          next.emplace_back(p.a, m);
          next.emplace_back(m, p.b);
        } else {
          accept(p);
        }
      }
      todo.swap(next);
    }
  }

  /// Adds a point mass m at energy e (the integral of g over a resonance too
  /// narrow to resolve).
  void add_mass(double e, double m) { masses_.emplace_back(e, m); }

  /// integral g(E) f(E) dE for the stored rule.
  double apply(const std::function<double(double)>& f) const {
    double s = 0;
    for (std::size_t i = 0; i < e_.size(); ++i) s += w_[i] * g_[i] * f(e_[i]);
    for (const auto& [e, m] : masses_) s += m * f(e);
    return s;
  }

  std::size_t nodes() const { return e_.size(); }
  std::size_t point_masses() const { return masses_.size(); }
  /// Sum of |Kronrod - Gauss| over accepted panels relative to sum |Kronrod|.
  double relative_residual() const { return total_ > 0 ? residual_ / total_ : 0.0; }

 private:
  struct Panel {
    double a = 0, b = 0, kronrod = 0, gauss = 0;
    std::vector<double> e, w, g;
  };

  static Panel panel(const std::function<double(double)>& g, double a, double b) {
    using K = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& xk = K::abscissa();
    const auto& wk = K::weights();
    const auto& xg = G::abscissa();
    const auto& wg = G::weights();
    Panel p;
    p.a = a, p.b = b;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    auto add = [&](double x, double w) {
      const double e = c + h * x;
      const double v = g(e);
      p.e.push_back(e);
      p.w.push_back(w * h);
      p.g.push_back(v);
      p.kronrod += w * h * v;
      for (std::size_t j = 0; j < xg.size(); ++j)
        if (std::abs(std::abs(x) - xg[j]) < 1e-14) p.gauss += wg[j] * h * v;
    };
    for (std::size_t i = 0; i < xk.size(); ++i) {
      add(xk[i], wk[i]);
      if (xk[i] != 0.0) add(-xk[i], wk[i]);
    }
    return p;
  }

  void accept(const Panel& p) {
    residual_ += std::abs(p.kronrod - p.gauss);
    total_ += std::abs(p.kronrod);
    e_.insert(e_.end(), p.e.begin(), p.e.end());
    w_.insert(w_.end(), p.w.begin(), p.w.end());
    g_.insert(g_.end(), p.g.begin(), p.g.end());
  }

  std::vector<double> e_, w_, g_;
  std::vector<std::pair<double, double>> masses_;
  double residual_ = 0.0, total_ = 0.0;
};

enum class ThermalVariant { molecule, rigid, smooth, arrhenius };

inline std::string variant_name(ThermalVariant v) {
  switch (v) {
    case ThermalVariant::molecule: return "Fm";
    case ThermalVariant::rigid: return "Frm";
    case ThermalVariant::smooth: return "Fp";
    case ThermalVariant::arrhenius: return "arrhenius";
  }
  return "";
}

struct ThermalCurve {
  ThermalVariant variant = ThermalVariant::smooth;
  std::vector<double> T, F;
  double E_max = 2300.0;
  std::vector<std::string> notes;  // approximations in force
};

struct ThermalOptions {
  double E_max = 2300.0;
  double T_min = 20.0;          // smallest temperature the rule must resolve
  double narrow_below = 1e-9;   // gamma/E_n below which a cell is a point mass
  double coupled_from_omega = 1e-2;  // F_m: anchors below, direct coupled W above
  double panel_tol = 1e-8;
  unsigned threads = 1;
};

/// Default temperature grid: `count` log-spaced points in [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0 && hi > lo && count >= 2)) throw domain_error("log_grid: bad range");
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    t[static_cast<std::size_t>(i)] =
        lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return t;
}

/// Builds the energy rule of a variant. `notes` receives the approximations.
class ThermalModel {
 public:
  ThermalModel(const RigidMolecule& rm, ThermalOptions opt = {})
      : rm_(rm), opt_(opt) {
    if (!(opt.E_max > 0)) throw domain_error("thermal: E_max must be positive");
  }

  EnergyRule smooth_rule() const {
    EnergyRule r;
    r.add_adaptive(
        [&](double e) {
          const double w = rm_.omega(e);
          return w / (2.0 - w);
        },
        0.0, opt_.E_max, max_width(), opt_.panel_tol, 40, opt_.threads);
    return r;
  }

  EnergyRule rigid_rule(std::vector<std::string>* notes = nullptr) const {
    EnergyRule r;
    const ResonanceLadder l = ladder();
    auto w_rm = [&](double e) { return rm_.amplitudes(e).W; };
    add_direct(r, w_rm, 0.0, std::min(l.minima.front(), opt_.E_max), {});
    std::size_t narrow = 0;
    for (std::size_t n = 0; n < l.positions.size(); ++n) {
      const double a = l.minima[n], b = std::min(l.minima[n + 1], opt_.E_max);
      if (a >= opt_.E_max) break;
      const double e = l.positions[n];
      const double de = l.minima[n + 1] - l.minima[n];
      const double om = rm_.omega(e);
      const double gamma = width_from_omega(om, de);
      if (gamma < opt_.narrow_below * e && e <= b) {
        add_narrow_cell(r, a, b, e, de, om);
        ++narrow;
      } else {
        add_direct(r, w_rm, a, b, {e, gamma});
      }
    }
    const double last = l.minima[std::min(l.positions.size(), l.minima.size() - 1)];
    if (last < opt_.E_max) add_direct(r, w_rm, last, opt_.E_max, {});
    if (notes)
      notes->push_back(std::to_string(narrow) +
                       " narrow resonance cells integrated analytically");
    return r;
  }

  /// Molecule variant: coupled inner-region levels anchor the narrow cells;
  /// direct coupled W above the anchor region up to the solver's validity
  /// cap; rigid W above the cap.
  EnergyRule molecule_rule(const CoupledSolver& cs,
                           std::vector<std::string>* notes = nullptr) const {
    EnergyRule r;
    const ResonanceLadder l = ladder();
    auto w_rm = [&](double e) { return rm_.amplitudes(e).W; };
    auto w_m = [&](double e) { return cs.solve(e).W; };
    // Anchor region ends at the first minimum whose omega reaches the switch.
    std::size_t switch_cell = l.positions.size();
    for (std::size_t n = 0; n < l.positions.size(); ++n)
      if (rm_.omega(l.minima[n]) >= opt_.coupled_from_omega || l.minima[n] >= opt_.E_max) {
        switch_cell = n;
        break;
      }
    const double e_switch = std::min(l.minima[switch_cell], opt_.E_max);
    const double cap = std::min(cs.settings().energy_cap, opt_.E_max);
    std::vector<double> levels;
    if (e_switch > 1.0)
      for (const auto& b : cs.box_levels(0.5, e_switch, 1e-10)) levels.push_back(b.E_k);
    add_background(r, 0.0, std::min(l.minima.front(), e_switch));
    for (std::size_t n = 0; n < switch_cell; ++n) {
      const double a = l.minima[n], b = std::min(l.minima[n + 1], e_switch);
      const double de = l.minima[n + 1] - l.minima[n];
      double anchor = l.positions[n];
      double best = 0.5 * de;
      for (double x : levels)
        if (std::abs(x - l.positions[n]) < best) best = std::abs(x - l.positions[n]), anchor = x;
      const double om = rm_.omega(anchor);
      add_background(r, a, b);
      r.add_mass(anchor, de * (om / (2.0 - om) - 0.25 * om * om));
    }
    if (cap > e_switch) add_direct(r, w_m, e_switch, cap, {}, 1.0);
    if (opt_.E_max > std::max(cap, e_switch))
      add_direct(r, w_rm, std::max(cap, e_switch), opt_.E_max, {});
    if (notes) {
      notes->push_back("below " + fmt(e_switch) +
                       " K: coupled inner-region levels as anchors with one-barrier widths");
      if (opt_.E_max > cap)
        notes->push_back("above " + fmt(cap) + " K: rigid-model W substituted");
    }
    return r;
  }

  /// F(T) on a temperature grid from a prepared rule.
  ThermalCurve evaluate(const EnergyRule& rule, ThermalVariant v,
                        const std::vector<double>& temperatures) const {
    ThermalCurve c;
    c.variant = v;
    c.E_max = opt_.E_max;
    for (double t : temperatures) {
      const SmoothWeight f = boltzmann_weight(t);
      c.T.push_back(t);
      c.F.push_back(rule.apply(f.f) + std::exp(-opt_.E_max / t));
    }
    return c;
  }

  ThermalCurve arrhenius_curve(const std::vector<double>& temperatures) const {
    ThermalCurve c;
    c.variant = ThermalVariant::arrhenius;
    c.E_max = opt_.E_max;
    for (double t : temperatures) {
      c.T.push_back(t);
      c.F.push_back(arrhenius(t, rm_.spec().barrier.V0));
    }
    return c;
  }

  ResonanceLadder ladder() const { return rigid_ladder(rm_, opt_.E_max, opt_.threads); }
  const ThermalOptions& options() const { return opt_; }

 private:
  struct Peak {
    double e = 0, gamma = 0;
  };

  static std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", x);
    return buf;
  }

  double max_width() const { return std::max(1e-3, std::min(opt_.T_min, 25.0)); }

  // omega^2/4: the off-resonance part of a narrow cell.
  void add_background(EnergyRule& r, double a, double b) const {
    r.add_adaptive(
        [&](double e) {
          const double w = rm_.omega(e);
          return 0.25 * w * w;
        },
        a, b, max_width(), opt_.panel_tol, 40, opt_.threads);
  }

  void add_narrow_cell(EnergyRule& r, double a, double b, double e, double de,
                       double om) const {
    add_background(r, a, b);
    r.add_mass(e, de * (om / (2.0 - om) - 0.25 * om * om));
  }

  // Direct quadrature of W on [a, b]; a peak inside gets geometric breakpoints.
  void add_direct(EnergyRule& r, const std::function<double(double)>& w, double a,
                  double b, Peak peak, double width_cap = 1e300) const {
    if (!(b > a)) return;
    const double mw = std::min(max_width(), width_cap);
    if (!(peak.gamma > 0) || peak.e <= a || peak.e >= b) {
      r.add_adaptive(w, a, b, mw, opt_.panel_tol, 40, opt_.threads);
      return;
    }
    std::vector<double> cuts{peak.e};
    for (double d = 0.5 * peak.gamma; peak.e - d > a; d *= 4) cuts.push_back(peak.e - d);
    for (double d = 0.5 * peak.gamma; peak.e + d < b; d *= 4) cuts.push_back(peak.e + d);
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      r.add_adaptive(w, cuts[i], cuts[i + 1], mw, opt_.panel_tol, 40, opt_.threads);
  }

  const RigidMolecule& rm_;
  ThermalOptions opt_;
};

}  // namespace moltunnel
