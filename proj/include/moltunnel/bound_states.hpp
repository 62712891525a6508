#pragma once

// Bound states of -c psi'' + V psi = E psi on a finite grid with Dirichlet
// walls, by Numerov node counting (renormalized ratio form) and bisection.
// Used for the Morse basis of the close-coupling expansion.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "moltunnel/errors.hpp"
#include "moltunnel/grid.hpp"
#include "moltunnel/potentials.hpp"
#include "moltunnel/units.hpp"

namespace moltunnel {

struct BoundState {
  int index = 0;          // 1-based, ascending energy
  double energy = 0.0;    // K
  UniformGrid grid;
  std::vector<double> psi;  // normalized: sum w_i psi_i^2 = 1 (Simpson)

  int sign_changes(double rel_floor = 1e-8) const {
    double peak = 0;
    for (double v : psi) peak = std::max(peak, std::abs(v));
    int count = 0;
    int last = 0;
    for (double v : psi) {
      if (std::abs(v) < rel_floor * peak) continue;
      const int s = v > 0 ? 1 : -1;
      if (last != 0 && s != last) ++count;
      last = s;
    }
    return count;
  }
};

/// Numerov eigen-solver for a single channel on a fixed grid.
class NumerovEigenSolver {
 public:
  NumerovEigenSolver(UniformGrid grid, std::vector<double> potential,
                     KineticCoefficient kinetic)
      : grid_(grid), v_(std::move(potential)), c_(kinetic.value) {
    if (v_.size() != grid_.size())
      throw domain_error("NumerovEigenSolver: potential size mismatch");
    if (grid_.intervals < 4)
      throw domain_error("NumerovEigenSolver: grid too small");
  }

  /// Number of Dirichlet eigenvalues strictly below e.
  int count_below(double e) const {
    const std::size_t n = grid_.intervals;
    const auto [lo, hi] = active_range(e);
    int nodes = 0;
    // F_lo = 0 at the left wall, R_{lo+1} = U_{lo+1}.
    double r = 0.0;
    bool first = true;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double u = u_at(i, e);
      r = first ? u : u - 1.0 / r;
      first = false;
      if (r < 0) ++nodes;
    }
    (void)n;
    return nodes;
  }

  /// The m-th (0-based) eigenvalue, located by bisection on count_below.
  double eigenvalue(int m, double lower, double upper, double tol = 1e-11) const {
    if (count_below(lower) > m || count_below(upper) <= m)
      throw convergence_error("eigenvalue bracket does not contain level " +
                                  std::to_string(m + 1),
                              m + 1);
    for (int it = 0; it < 200 && upper - lower > tol * std::max(1.0, std::abs(upper)); ++it) {
      const double mid = 0.5 * (lower + upper);
      (count_below(mid) > m ? upper : lower) = mid;
    }
    return 0.5 * (lower + upper);
  }

  /// Eigenfunction at a converged eigenvalue e, normalized with Simpson
  /// weights and signed positive on its first lobe.
  std::vector<double> eigenfunction(double e) const {
    const std::size_t n = grid_.intervals;
    const auto [lo, hi] = active_range(e);
    // Matching point: outermost classically allowed point.
    std::size_t match = lo + 1;
    for (std::size_t i = lo + 1; i < hi; ++i)
      if (v_[i] < e) match = i;
    std::vector<double> fwd(n + 1, 0.0), bwd(n + 1, 0.0);
    {
      double r = 0;
      bool first = true;
      for (std::size_t i = lo + 1; i < hi; ++i) {
        const double u = u_at(i, e);
        r = first ? u : u - 1.0 / r;
        first = false;
        fwd[i] = r;  // F_{i+1}/F_i
      }
    }
    {
      double b = 0;
      bool first = true;
      for (std::size_t i = hi - 1; i > lo; --i) {
        const double u = u_at(i, e);
        b = first ? u : u - 1.0 / b;
        first = false;
        bwd[i] = b;  // F_{i-1}/F_i
      }
    }
    std::vector<double> f(n + 1, 0.0);
    f[match] = 1.0;
    for (std::size_t i = match; i > lo + 1; --i) f[i - 1] = f[i] / fwd[i - 1];
    for (std::size_t i = match; i + 1 < hi; ++i) f[i + 1] = f[i] / bwd[i + 1];
    std::vector<double> psi(n + 1, 0.0);
    for (std::size_t i = lo + 1; i < hi; ++i) psi[i] = f[i] / (1.0 - t_at(i, e));
    const auto w = simpson_weights(grid_);
    double norm = 0;
    for (std::size_t i = 0; i <= n; ++i) norm += w[i] * psi[i] * psi[i];
    double scale = 1.0 / std::sqrt(norm);
    double peak = 0;
    for (double v : psi) peak = std::max(peak, std::abs(v));
    for (double v : psi)
      if (std::abs(v) > 1e-6 * peak) {
        if (v < 0) scale = -scale;
        break;
      }
    for (auto& v : psi) v *= scale;
    return psi;
  }

 private:
  double t_at(std::size_t i, double e) const {
    return grid_.step * grid_.step / 12.0 * (v_[i] - e) / c_;
  }
  double u_at(std::size_t i, double e) const {
    return 12.0 / (1.0 - t_at(i, e)) - 10.0;
  }
  // Points where the Numerov transform is ill-defined (T >= 1/2, deep inside
  // a hard wall) are treated as part of the wall.
  std::pair<std::size_t, std::size_t> active_range(double e) const {
    std::size_t lo = 0, hi = grid_.intervals;
    while (lo + 4 < hi && t_at(lo + 1, e) >= 0.5) ++lo;
    while (hi > lo + 4 && t_at(hi - 1, e) >= 0.5) --hi;
    return {lo, hi};
  }

  UniformGrid grid_;
  std::vector<double> v_;
  double c_;
};

struct MorseGrid {
  double x_min = 1.2;
  double x_max = 12.0;
  double step = 0.005;
};

/// Numerical Morse eigenstates on the half line x > 0 (the potential depends
/// on |x| and is effectively infinite at x_min). One state per analytic level,
/// limited to `max_states` when positive.
inline std::vector<BoundState> morse_wavefunctions(const MorseParams& p,
                                                   KineticCoefficient relative,
                                                   const MorseGrid& mg = {},
                                                   int max_states = 0) {
  p.validate();
  const auto analytic = morse_levels(p, relative);
  int count = static_cast<int>(analytic.size());
  if (max_states > 0) count = std::min(count, max_states);
  const UniformGrid g = UniformGrid::spanning(mg.x_min, mg.x_max, mg.step);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = morse_value(p, g.at(i));
  NumerovEigenSolver solver(g, v, relative);
  std::vector<BoundState> states;
  for (int m = 0; m < count; ++m) {
    const double e = solver.eigenvalue(m, -p.U0, 0.0);
    // A level that is only bound analytically may be pushed to the wall by
    // the finite box; require the numeric level to stay below zero.
    if (!(e < 0.0))
      throw convergence_error("Morse level " + std::to_string(m + 1) +
                                  " not bound on the grid",
                              m + 1);
    states.push_back({m + 1, e, g, solver.eigenfunction(e)});
  }
  return states;
}

}  // namespace moltunnel
