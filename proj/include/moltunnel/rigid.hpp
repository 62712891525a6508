#pragma once

// Rigid-molecule double-barrier model: a particle of mass 2m crossing
// V(y + x0/2) + V(y - x0/2), the two-barrier amplitude composition, the
// round-trip phase S(E), and the closed forms built on them.

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "moltunnel/bound_states.hpp"
#include "moltunnel/errors.hpp"
#include "moltunnel/numeric.hpp"
#include "moltunnel/potentials.hpp"
#include "moltunnel/scatter1d.hpp"
#include "moltunnel/units.hpp"

namespace moltunnel {

/// Ground-state average of the pair barrier,
/// integral of (V(y + x/2) + V(y - x/2)) phi_1(x)^2 dx over the state's grid.
inline double averaged_barrier(double y, const BoundState& ground,
                               const GaussianBarrierParams& b) {
  const auto& psi = ground.psi;
  if (psi.size() != ground.grid.size() || psi.size() < 3)
    throw domain_error("averaged_barrier: malformed ground state");
  double peak = 0;
  for (double v : psi) peak = std::max(peak, std::abs(v));
  if (std::abs(psi.front()) > 1e-6 * peak || std::abs(psi.back()) > 1e-6 * peak)
    throw domain_error("averaged_barrier: grid too narrow for the ground-state support");
  const auto w = simpson_weights(ground.grid);
  double sum = 0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double x = ground.grid.at(i);
    sum += w[i] * psi[i] * psi[i] * pair_barrier_value(b, y, x);
  }
  return sum;
}

struct RigidMoleculeSpec {
  double x0 = 2.47;                    // fixed interatomic distance, A
  GaussianBarrierParams barrier{};
  double mass_amu = beryllium_mass_amu;  // per atom
  /// Replace the fixed-x0 pair barrier by its ground-state average.
  bool ground_state_average = false;
  std::optional<BoundState> ground_state;

  void validate() const {
    if (!(x0 > 0)) throw domain_error("RigidMoleculeSpec: x0 must be positive");
    barrier.validate();
    mass_factor(mass_amu);
    if (ground_state_average && !ground_state)
      throw domain_error("RigidMoleculeSpec: averaged barrier needs a ground state");
  }

  /// Barrier seen by the centre of mass.
  std::function<double(double)> potential() const {
    validate();
    if (ground_state_average) {
      auto gs = std::make_shared<BoundState>(*ground_state);
      GaussianBarrierParams b = barrier;
      return [gs, b](double y) { return averaged_barrier(y, *gs, b); };
    }
    GaussianBarrierParams left = barrier, right = barrier;
    left.center = barrier.center - 0.5 * x0;
    right.center = barrier.center + 0.5 * x0;
    return [left, right](double y) {
      return gaussian_value(left, y) + gaussian_value(right, y);
    };
  }
};

/// Amplitudes of the two single-barrier problems: 1 and 3 are the outer
/// regions, 2 the region between the barriers.
struct TwoBarrierDecomposition {
  std::complex<double> T12, T23, R21, R23;
  double S = 0.0;      // round-trip phase arg(R21 R23), wrapped
  double omega = 0.0;  // single-barrier transmission probability
};

/// T13 = T12 T23 / (1 - R21 R23).
inline std::complex<double> compose(const TwoBarrierDecomposition& d) {
  const auto rr = d.R21 * d.R23;
  if (std::abs(rr) > 1.0 + 1e-12)
    throw domain_error("compose: |R21 R23| > 1 is not physical");
  return d.T12 * d.T23 / (1.0 - rr);
}

/// Double-barrier transmission in terms of the one-barrier transmission omega
/// and the round-trip phase S.
inline double wrm_analytic(double omega, double S) {
  if (!(omega > 0.0 && omega <= 1.0))
    throw domain_error("wrm_analytic: omega must lie in (0, 1]");
  const double w2 = omega * omega;
  // 1 - cos S written as 2 sin^2(S/2) keeps full relative accuracy near S = 2 pi n.
  const double s = std::sin(0.5 * S);
  return w2 / (w2 + 4.0 * (1.0 - omega) * s * s);
}

/// Breit-Wigner line  (Gamma^2/4) / ((E - En)^2 + Gamma^2/4).
inline double breit_wigner(double e, double en, double gamma) {
  if (!(gamma > 0)) throw domain_error("breit_wigner: gamma must be positive");
  const double g2 = 0.25 * gamma * gamma;
  const double d = e - en;
  return g2 / (d * d + g2);
}

/// Resonance width from the one-barrier transmission and the level spacing.
inline double width_from_omega(double omega_at_resonance, double dE) {
  if (!(dE > 0)) throw domain_error("width_from_omega: spacing must be positive");
  return omega_at_resonance * dE / std::numbers::pi;
}

/// Tabulated, unwrapped round-trip phase S(E) on [lo, hi].
class ActionCurve {
 public:
  ActionCurve() = default;
  ActionCurve(std::vector<double> e, std::vector<double> s)
      : e_(std::move(e)), s_(std::move(s)) {}

  bool empty() const { return e_.empty(); }
  double lo() const { return e_.front(); }
  double hi() const { return e_.back(); }
  const std::vector<double>& energies() const { return e_; }
  const std::vector<double>& values() const { return s_; }

  /// Linear interpolation of the unwrapped phase.
  double estimate(double e) const {
    if (e <= e_.front()) return s_.front();
    if (e >= e_.back()) return s_.back();
    const auto it = std::upper_bound(e_.begin(), e_.end(), e);
    const std::size_t j = static_cast<std::size_t>(it - e_.begin());
    const double f = (e - e_[j - 1]) / (e_[j] - e_[j - 1]);
    return s_[j - 1] + f * (s_[j] - s_[j - 1]);
  }

  /// Energy interval [e_j, e_{j+1}] whose unwrapped phases bracket `target`.
  std::optional<std::pair<double, double>> bracket(double target) const {
    for (std::size_t j = 0; j + 1 < e_.size(); ++j)
      if ((s_[j] - target) * (s_[j + 1] - target) <= 0.0 && s_[j] != s_[j + 1])
        return std::make_pair(e_[j], e_[j + 1]);
    return std::nullopt;
  }

 private:
  std::vector<double> e_, s_;
};

/// Solver for one rigid-molecule geometry. The potential is tabulated once;
/// the split point between the two single-barrier problems is y = 0, where
/// composition of the half-space transfer matrices is exact.
class RigidMolecule {
 public:
  explicit RigidMolecule(RigidMoleculeSpec spec, SolverSettings s = {})
      : spec_(std::move(spec)),
        kin_(KineticCoefficient::center_of_mass(spec_.mass_amu)),
        full_(spec_.potential(), kin_, s),
        single_(spec_.barrier, spec_.mass_amu, s) {
    if (!full_.potential().symmetric())
      throw unsupported_input("RigidMolecule: barrier pair must be symmetric about y = 0");
    const std::size_t mid = static_cast<std::size_t>(full_.potential().half());
    left_ = full_.potential().restricted(0, mid);
    right_ = full_.potential().restricted(mid, full_.potential().slices());
  }

  const RigidMoleculeSpec& spec() const { return spec_; }
  KineticCoefficient kinetic() const { return kin_; }
  const Scatterer& scatterer() const { return full_; }
  const SingleBarrier& single() const { return single_; }

  /// Transmission through both barriers, direct solve.
  template <class Real = double>
  Real wrm_direct(const Real& e) const {
    return full_.template transfer<Real>(e).transmission();
  }
  ScatteringAmplitudes amplitudes(double e) const { return full_.solve(e); }

  /// One-barrier transmission omega(E) of the isolated Gaussian.
  double omega(double e) const { return single_.omega(e); }

  /// Half-space amplitudes (split at y = 0) and their round-trip phase.
  template <class Real = double>
  std::pair<std::complex<Real>, TransferResult<Real>> round_trip(const Real& e) const {
    const auto ql = propagate<Real>(left_, kin_, e);
    const auto qr = propagate<Real>(right_, kin_, e);
    return {ql.r_right() * qr.r_left(), qr};
  }

  /// Wrapped round-trip phase arg(R21 R23) in working precision.
  template <class Real = double>
  Real wrapped_phase(const Real& e) const {
    using std::arg;
    return arg(round_trip<Real>(e).first);
  }

  TwoBarrierDecomposition decompose(double e) const {
    const auto ql = propagate<double>(left_, kin_, e);
    const auto qr = propagate<double>(right_, kin_, e);
    TwoBarrierDecomposition d;
    d.T12 = ql.t();
    d.R21 = ql.r_right();
    d.T23 = qr.t();
    d.R23 = qr.r_left();
    d.S = std::arg(d.R21 * d.R23);
    d.omega = single_.omega(e);
    return d;
  }

  /// Decomposition from the two isolated Gaussians, each solved over the full
  /// domain at its own centre.
  TwoBarrierDecomposition decompose_isolated(double e,
                                             SolverSettings s = {}) const {
    GaussianBarrierParams l = spec_.barrier, r = spec_.barrier;
    l.center -= 0.5 * spec_.x0;
    r.center += 0.5 * spec_.x0;
    const Scatterer sl([l](double y) { return gaussian_value(l, y); }, kin_, s);
    const Scatterer sr([r](double y) { return gaussian_value(r, y); }, kin_, s);
    const auto ql = sl.transfer<double>(e);
    const auto qr = sr.transfer<double>(e);
    TwoBarrierDecomposition d;
    d.T12 = ql.t();
    d.R21 = ql.r_right();
    d.T23 = qr.t();
    d.R23 = qr.r_left();
    d.S = std::arg(d.R21 * d.R23);
    d.omega = single_.omega(e);
    return d;
  }

  /// Unwrapped S on [lo, hi], sampled so consecutive phases differ by less
  /// than pi/4. The branch is fixed by S -> 0+ as E -> 0+.
  ActionCurve action_curve(double lo, double hi, double min_step = 1e-9) const {
    if (!(lo > 0 && hi > lo)) throw domain_error("action_curve: need 0 < lo < hi");
    std::vector<double> es{lo}, ss{wrapped_phase(lo)};
    const double quarter = 0.25 * std::numbers::pi;
    double e = lo;
    double step = std::min(1.0, 0.01 * (hi - lo));
    while (e < hi) {
      double next = std::min(hi, e + step);
      double d = wrap_phase(wrapped_phase(next) - ss.back());
      while (std::abs(d) > quarter) {
        step *= 0.5;
        if (step < min_step)
          throw convergence_error(
              "action_curve: phase unwrap ambiguous near E = " + std::to_string(e) +
              " K; use a finer scan");
        next = std::min(hi, e + step);
        d = wrap_phase(wrapped_phase(next) - ss.back());
      }
      es.push_back(next);
      ss.push_back(ss.back() + d);
      e = next;
      if (std::abs(d) < 0.25 * quarter) step *= 1.5;
    }
    return ActionCurve(std::move(es), std::move(ss));
  }

  /// Unwrapped S(E) at a single energy.
  double action_S(double e) const {
    const double lo = std::min(1e-3, 0.5 * e);
    return action_curve(lo, e).values().back();
  }

  /// Energy where the unwrapped phase equals `target`, using the curve for
  /// the bracket and the exact wrapped phase for the solve.
  double solve_phase(const ActionCurve& curve, double target, int index = -1) const {
    const auto br = curve.bracket(target);
    if (!br)
      throw convergence_error("solve_phase: phase " + std::to_string(target) +
                                  " not bracketed",
                              index);
    auto f = [&](double e) {
      const double est = curve.estimate(e);
      return est + wrap_phase(wrapped_phase(e) - est) - target;
    };
    double a = br->first, b = br->second;
    double fa = f(a), fb = f(b);
    if (fa == 0) return a;
    if (fb == 0) return b;
    if (fa * fb > 0)
      throw convergence_error("solve_phase: bracket lost sign change", index);
    boost::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (r.first + r.second);
  }

  /// Refines a root of the round-trip phase (S = 2 pi n) in working precision
  /// Real, starting from a double estimate. Secant on the wrapped phase.
  template <class Real>
  Real refine_resonance(double e_guess, int index = -1) const {
    using std::abs;
    Real x0 = Real(e_guess);
    Real x1 = x0 * (1 + Real(1e-12));
    Real f0 = wrapped_phase<Real>(x0), f1 = wrapped_phase<Real>(x1);
    for (int it = 0; it < 60; ++it) {
      if (f1 == f0) break;
      const Real x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
      x0 = x1, f0 = f1;
      x1 = x2;
      f1 = wrapped_phase<Real>(x1);
      if (abs(f1) < Real(64) * std::numeric_limits<Real>::epsilon()) return x1;
      if (abs(x1 - x0) <= abs(x1) * Real(4) * std::numeric_limits<Real>::epsilon())
        return x1;
    }
    if (abs(f1) > Real(1e-6))
      throw convergence_error("refine_resonance: secant did not converge", index);
    return x1;
  }

  /// Quasi-classical phase 2 * integral k(y) dy between the inner turning
  /// points, shifted by pi.
  double quasi_classical_S(double e, int points = 4001) const {
    const auto v = spec_.potential();
    double peak = 0.5 * spec_.x0;
    // locate the right barrier maximum on [0, x0]
    {
      double best = v(peak);
      for (int i = 0; i <= 2000; ++i) {
        const double y = spec_.x0 * i / 2000.0;
        if (v(y) > best) best = v(y), peak = y;
      }
    }
    if (v(0.0) >= e)
      throw domain_error("quasi_classical_S: energy below the inter-barrier floor");
    if (v(peak) <= e)
      throw domain_error("quasi_classical_S: energy above the barrier top");
    double a = 0.0, b = peak;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      (v(m) < e ? a : b) = m;
    }
    const double turn = 0.5 * (a + b);
    // k ~ sqrt(turn - y) near the turning point: substitute y = turn (1 - u^2).
    double sum = 0.0;
    const double du = 1.0 / (points - 1);
    for (int i = 0; i < points; ++i) {
      const double u = i * du;
      const double y = turn * (1.0 - u * u);
      const double k = std::sqrt(std::max(0.0, (e - v(y)) / kin_.value));
      const double wgt = (i == 0 || i == points - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      sum += wgt * k * 2.0 * turn * u;
    }
    const double half_integral = sum * du / 3.0;  // integral over [0, turn]
    return 4.0 * half_integral + std::numbers::pi;
  }

 private:
  RigidMoleculeSpec spec_;
  KineticCoefficient kin_;
  Scatterer full_;
  SingleBarrier single_;
  SlicedPotential left_, right_;
};

inline double wrm_direct(const RigidMoleculeSpec& spec, double e,
                         SolverSettings s = {}) {
  return RigidMolecule(spec, s).amplitudes(e).W;
}

}  // namespace moltunnel
