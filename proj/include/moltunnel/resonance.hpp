#pragma once

// Transmission scans and resonance catalogs. Rigid-model resonances are roots
// of S(E) = 2 pi n; the narrow ones are refined and sampled in quad precision.
// Coupled-model resonances are the eigenvalues of the inner (between-barrier)
// problem, refined by local maximization of W when their width is resolvable
// in double precision.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "moltunnel/coupled.hpp"
#include "moltunnel/errors.hpp"
#include "moltunnel/fit.hpp"
#include "moltunnel/numeric.hpp"
#include "moltunnel/parallel.hpp"
#include "moltunnel/rigid.hpp"

namespace moltunnel {

struct ScanPoint {
  double E = 0.0;
  double W = 0.0;
};

struct ScanCurve {
  std::string model;
  std::vector<ScanPoint> points;  // strictly increasing E
  bool incomplete = false;        // point budget ran out
};

struct ScanOptions {
  std::size_t initial_intervals = 64;
  std::size_t max_points = 20000;
  double min_step = 1e-12;   // K
  double log_jump = 0.5;     // max |delta log10 W| between neighbours
  unsigned threads = 1;
};

/// Recursive bisection of [lo, hi] until neighbouring samples differ by less
/// than `log_jump` decades. `seeds` are inserted verbatim (e.g. refined
/// resonance peaks that a double-precision scan cannot resolve).
inline ScanCurve adaptive_scan(const std::function<double(double)>& w, double lo,
                               double hi, const std::string& model,
                               ScanOptions opt = {},
                               const std::vector<ScanPoint>& seeds = {}) {
  if (!(lo > 0 && hi > lo)) throw domain_error("adaptive_scan: need 0 < lo < hi");
  if (opt.max_points < 2) throw domain_error("adaptive_scan: max_points must be at least 2");
  opt.initial_intervals = std::clamp<std::size_t>(opt.initial_intervals, 1, opt.max_points - 1);
  std::vector<double> e0;
  for (std::size_t i = 0; i <= opt.initial_intervals; ++i)
    e0.push_back(lo + (hi - lo) * static_cast<double>(i) /
                          static_cast<double>(opt.initial_intervals));
  std::vector<ScanPoint> pts(e0.size());
  parallel_for(e0.size(), opt.threads, [&](std::size_t i) { pts[i] = {e0[i], w(e0[i])}; });
  for (const auto& s : seeds)
    if (s.E > lo && s.E < hi) pts.push_back(s);
  auto by_e = [](const ScanPoint& a, const ScanPoint& b) { return a.E < b.E; };
  std::sort(pts.begin(), pts.end(), by_e);
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const ScanPoint& a, const ScanPoint& b) { return a.E == b.E; }),
            pts.end());
  auto lg = [](double v) { return std::log10(std::max(v, 1e-300)); };
  ScanCurve out;
  out.model = model;
  while (true) {
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double a = pts[i].E, b = pts[i + 1].E;
      if (b - a <= 2.0 * opt.min_step) continue;
      if (std::abs(lg(pts[i].W) - lg(pts[i + 1].W)) >= opt.log_jump)
        mids.push_back(0.5 * (a + b));
    }
    if (mids.empty()) break;
    if (pts.size() + mids.size() > opt.max_points) {
      mids.resize(opt.max_points > pts.size() ? opt.max_points - pts.size() : 0);
      out.incomplete = true;
    }
    std::vector<ScanPoint> added(mids.size());
    parallel_for(mids.size(), opt.threads,
                 [&](std::size_t i) { added[i] = {mids[i], w(mids[i])}; });
    std::vector<ScanPoint> merged;
    merged.reserve(pts.size() + added.size());
    std::merge(pts.begin(), pts.end(), added.begin(), added.end(),
               std::back_inserter(merged), by_e);
    pts.swap(merged);
    if (out.incomplete) break;
  }
  for (auto& p : pts) p.W = std::clamp(p.W, 0.0, 1.0);
  out.points = std::move(pts);
  return out;
}

/// Local maxima of a scan with W >= threshold.
inline std::vector<ScanPoint> scan_peaks(const ScanCurve& c, double threshold = 0.5) {
  std::vector<ScanPoint> out;
  const auto& p = c.points;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool left = i == 0 || p[i].W > p[i - 1].W;
    const bool right = i + 1 == p.size() || p[i].W >= p[i + 1].W;
    if (left && right && p[i].W >= threshold) out.push_back(p[i]);
  }
  return out;
}

struct ResonanceRecord {
  int n = 0;
  double E_n = 0.0;      // K
  double E_offset = 0.0; // extended-precision correction: peak at E_n + E_offset
  double gamma_fit = 0.0;
  double gamma_formula = 0.0;
  double W_peak = 0.0;
  double fit_rms = 0.0;
  double dE = 0.0;       // spacing of the neighbouring minima
  double spacing = 0.0;  // E_{n+1} - E_n (0 when unknown)
  double omega = 0.0;    // one-barrier transmission at E_n
  bool fitted = false;   // gamma_fit from the line-shape fit (else the formula)
  bool extended_precision = false;
  bool even = true;      // parity of the inner-region state (coupled only)
  std::string model;
};

struct ResonanceOptions {
  unsigned threads = 1;
  int fit_samples = 41;
  double fit_window = 5.0;          // half-window in units of gamma_formula
  double quad_below = 1e-9;         // gamma/E below which quad precision is used
  double resolvable_above = 1e-14;  // coupled: gamma/E needed for peak refinement
};

struct RigidCatalog {
  std::vector<ResonanceRecord> records;
  ActionCurve curve;
};

namespace detail {

/// Fit on samples x_i = u_i * window (in units of g0) of ln W(center + x*g0).
template <class Sampler>
LorentzFit fit_line(Sampler&& ln_w_at, double g0, const ResonanceOptions& opt) {
  std::vector<double> x, y;
  const int m = std::max(opt.fit_samples, 5);
  for (int i = 0; i < m; ++i) {
    const double u = -1.0 + 2.0 * i / (m - 1);
    x.push_back(u * opt.fit_window);
    y.push_back(ln_w_at(u * opt.fit_window * g0));
  }
  LorentzFit f = fit_breit_wigner(x, y, 1.0, 0.0);
  f.center *= g0;
  f.gamma *= g0;
  return f;
}

/// Maximizes a unimodular peak on [a, b] by golden section.
template <class F>
double golden_max(F&& f, double a, double b, int iters = 80) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 4 * std::numeric_limits<double>::epsilon() * std::abs(b); ++i) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - r * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + r * (b - a), fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Lowest energy in (0, hi] where the round-trip reflection |R21 R23| falls
/// to `level`, or hi when it stays above. Beyond it W is flat to ~4 level and
/// the phase S loses meaning once |R21 R23| reaches rounding noise.
inline double rigid_flat_energy(const RigidMolecule& rm, double hi, double level = 1e-6) {
  auto rr = [&](double e) { return std::abs(rm.round_trip(e).first); };
  if (rr(hi) >= level) return hi;
  double a = std::min(1.0, 0.5 * hi), b = hi;
  if (rr(a) < level) return a;
  while (b - a > 1e-6 * b) {
    const double m = 0.5 * (a + b);
    (rr(m) >= level ? a : b) = m;
  }
  return a;
}

/// Action curve reaching one minimum beyond the last resonance below `hi`.
/// Resonances are followed only while |R21 R23| >= 1e-6.
inline ActionCurve rigid_action_curve(const RigidMolecule& rm, double hi) {
  hi = rigid_flat_energy(rm, hi);
  const double ceiling = rigid_flat_energy(rm, 1e5, 1e-11);
  double top = std::min(1.25 * hi + 20.0, ceiling);
  for (int attempt = 0; attempt < 6; ++attempt) {
    ActionCurve c = rm.action_curve(std::min(1e-3, 0.5 * hi), top);
    const double s_hi = c.estimate(hi);
    const double need = 2 * std::numbers::pi * std::floor(s_hi / (2 * std::numbers::pi)) +
                        3 * std::numbers::pi;
    if (c.values().back() > need) return c;
    if (top >= ceiling) break;
    top = std::min(top * 1.6, ceiling);
  }
  throw convergence_error("rigid_action_curve: phase does not reach the next minimum");
}

/// Resonance positions E_n (S = 2 pi n) and minima m_n (S = (2n - 1) pi) of
/// the rigid model, double precision, all n with E_n <= hi.
struct ResonanceLadder {
  std::vector<double> positions;  // E_1, E_2, ...
  std::vector<double> minima;     // m_1 < E_1 < m_2 < E_2 < ... (one extra at the end)
};

inline ResonanceLadder rigid_ladder(const RigidMolecule& rm, double hi,
                                    unsigned threads = 1) {
  hi = rigid_flat_energy(rm, hi);
  const ActionCurve c = rigid_action_curve(rm, hi);
  const double two_pi = 2 * std::numbers::pi;
  const int n_max = static_cast<int>(std::floor(c.estimate(hi) / two_pi));
  ResonanceLadder l;
  l.positions.resize(static_cast<std::size_t>(std::max(n_max, 0)));
  l.minima.resize(l.positions.size() + 1);
  parallel_for(l.minima.size() + l.positions.size(), threads, [&](std::size_t j) {
    if (j < l.positions.size())
      l.positions[j] = rm.solve_phase(c, two_pi * static_cast<double>(j + 1),
                                      static_cast<int>(j + 1));
    else {
      const std::size_t k = j - l.positions.size();
      l.minima[k] = rm.solve_phase(c, std::numbers::pi * static_cast<double>(2 * k + 1),
                                   static_cast<int>(k + 1));
    }
  });
  return l;
}

/// One record per integer n with lo <= E_n <= hi (and below the flat region,
/// see rigid_flat_energy).
inline RigidCatalog locate_resonances_rigid(const RigidMolecule& rm, double lo, double hi,
                                            ResonanceOptions opt = {}) {
  if (!(lo > 0 && hi > lo)) throw domain_error("locate_resonances_rigid: need 0 < lo < hi");
  hi = rigid_flat_energy(rm, hi);
  RigidCatalog cat;
  cat.curve = rigid_action_curve(rm, hi);
  const auto& c = cat.curve;
  const double two_pi = 2 * std::numbers::pi;
  const int n_lo = std::max(1, static_cast<int>(std::ceil(c.estimate(lo) / two_pi)));
  const int n_hi = static_cast<int>(std::floor(c.estimate(hi) / two_pi));
  if (n_hi < n_lo) return cat;
  cat.records.resize(static_cast<std::size_t>(n_hi - n_lo + 1));
  parallel_for(cat.records.size(), opt.threads, [&](std::size_t j) {
    const int n = n_lo + static_cast<int>(j);
    ResonanceRecord r;
    r.n = n;
    r.model = "rigid";
    const double e = rm.solve_phase(c, two_pi * n, n);
    const double m_lo = rm.solve_phase(c, std::numbers::pi * (2 * n - 1), n);
    const double m_hi = rm.solve_phase(c, std::numbers::pi * (2 * n + 1), n);
    r.dE = m_hi - m_lo;
    if (c.values().back() > two_pi * (n + 1))
      r.spacing = rm.solve_phase(c, two_pi * (n + 1), n + 1) - e;
    r.omega = rm.omega(e);
    r.gamma_formula = width_from_omega(r.omega, r.dE);
    LorentzFit f;
    if (r.gamma_formula < opt.quad_below * e) {
      const quad eq = rm.refine_resonance<quad>(e, n);
      r.E_n = static_cast<double>(eq);
      r.E_offset = static_cast<double>(eq - quad(r.E_n));
      r.extended_precision = true;
      r.W_peak = std::min(1.0, static_cast<double>(rm.wrm_direct<quad>(eq)));
      f = detail::fit_line(
          [&](double dx) {
            return static_cast<double>(log(rm.wrm_direct<quad>(eq + quad(dx))));
          },
          r.gamma_formula, opt);
    } else {
      const double half = 2.0 * r.gamma_formula;
      const double peak = detail::golden_max(
          [&](double x) { return rm.amplitudes(x).W; }, e - half, e + half);
      r.E_n = peak;
      r.W_peak = std::min(1.0, rm.amplitudes(peak).W);
      f = detail::fit_line(
          [&](double dx) { return std::log(std::max(rm.amplitudes(peak + dx).W, 1e-300)); },
          r.gamma_formula, opt);
    }
    r.fitted = f.converged && f.gamma > 0 && std::isfinite(f.gamma);
    r.gamma_fit = r.fitted ? f.gamma : r.gamma_formula;
    r.fit_rms = f.rms;
    cat.records[j] = r;
  });
  return cat;
}

/// Coupled-model catalog on [lo, hi] (kinetic energy). Widths use the
/// one-barrier transmission of `rm` at the coupled position.
inline std::vector<ResonanceRecord> locate_resonances_coupled(const CoupledSolver& cs,
                                                              const RigidMolecule& rm,
                                                              double lo, double hi,
                                                              ResonanceOptions opt = {}) {
  const auto levels = cs.box_levels(lo, hi, 1e-12);
  std::vector<ResonanceRecord> out(levels.size());
  parallel_for(levels.size(), opt.threads, [&](std::size_t j) {
    ResonanceRecord r;
    r.n = static_cast<int>(j) + 1;
    r.model = "coupled";
    r.even = levels[j].even;
    const double e = levels[j].E_k;
    const double prev = j > 0 ? levels[j - 1].E_k : -1.0;
    const double next = j + 1 < levels.size() ? levels[j + 1].E_k : -1.0;
    if (prev > 0 && next > 0)
      r.dE = 0.5 * (next - prev);
    else if (next > 0)
      r.dE = next - e;
    else if (prev > 0)
      r.dE = e - prev;
    else
      r.dE = e;
    r.spacing = next > 0 ? next - e : 0.0;
    r.omega = rm.omega(e);
    r.gamma_formula = width_from_omega(r.omega, r.dE);
    auto w = [&](double x) { return cs.solve(x).W; };
    if (r.gamma_formula >= opt.resolvable_above * e) {
      // Inner-region eigenvalues sit near, not on, the peak: zoom in on a grid.
      double centre = e;
      double half = std::max(10.0 * r.gamma_formula, 2.0 * std::sqrt(r.omega) * r.dE);
      const int pts = 101;
      for (int level = 0; level < 12; ++level) {
        double best = -1, best_e = centre;
        for (int i = 0; i < pts; ++i) {
          const double x = centre - half + 2.0 * half * i / (pts - 1);
          const double v = w(x);
          if (v > best) best = v, best_e = x;
        }
        centre = best_e;
        const double spacing = 2.0 * half / (pts - 1);
        half = 2.0 * spacing;
        if (spacing < r.gamma_formula / 20.0) break;
      }
      centre = detail::golden_max(w, centre - half, centre + half, 60);
      r.E_n = centre;
      r.W_peak = std::min(1.0, w(centre));
      const LorentzFit f = detail::fit_line(
          [&](double dx) { return std::log(std::max(w(centre + dx), 1e-300)); },
          r.gamma_formula, opt);
      r.fitted = f.converged && f.gamma > 0 && std::isfinite(f.gamma);
      r.gamma_fit = r.fitted ? f.gamma : r.gamma_formula;
      r.fit_rms = f.rms;
    } else {
      r.E_n = e;
      r.W_peak = std::min(1.0, w(e));
      r.gamma_fit = r.gamma_formula;
      r.fit_rms = std::numeric_limits<double>::quiet_NaN();
      r.fitted = false;
    }
    out[j] = r;
  });
  return out;
}

struct CatalogPair {
  std::size_t a = 0, b = 0;
  double distance = 0.0;
  double tolerance = 0.0;
};

struct PairingReport {
  std::vector<CatalogPair> pairs;
  std::vector<std::size_t> unpaired_a, unpaired_b;
  bool all_a_paired() const { return unpaired_a.empty(); }
};

/// Greedy nearest-energy pairing; a[i] and b[j] may pair when
/// |E_a - E_b| <= fraction * (E_{n+1} - E_n) of a[i] (the minima spacing when
/// the next level is unknown).
inline PairingReport match_catalogs(const std::vector<ResonanceRecord>& a,
                                    const std::vector<ResonanceRecord>& b,
                                    double fraction = 0.25) {
  std::vector<CatalogPair> cand;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = std::abs(a[i].E_n - b[j].E_n);
      const double tol = fraction * (a[i].spacing > 0 ? a[i].spacing : a[i].dE);
      if (d <= tol) cand.push_back({i, j, d, tol});
    }
  std::stable_sort(cand.begin(), cand.end(), [](const CatalogPair& x, const CatalogPair& y) {
    return x.distance < y.distance;
  });
  std::vector<bool> used_a(a.size()), used_b(b.size());
  PairingReport rep;
  for (const auto& p : cand) {
    if (used_a[p.a] || used_b[p.b]) continue;
    used_a[p.a] = used_b[p.b] = true;
    rep.pairs.push_back(p);
  }
  std::sort(rep.pairs.begin(), rep.pairs.end(),
            [](const CatalogPair& x, const CatalogPair& y) { return x.a < y.a; });
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!used_a[i]) rep.unpaired_a.push_back(i);
  for (std::size_t j = 0; j < b.size(); ++j)
    if (!used_b[j]) rep.unpaired_b.push_back(j);
  return rep;
}

}  // namespace moltunnel
