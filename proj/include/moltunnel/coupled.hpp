#pragma once

// Close-coupling solver for a diatomic molecule crossing a repulsive barrier.
// The wavefunction is expanded over the Morse bound states phi_n(x); the
// centre-of-mass channel functions obey
//   -c u_n'' + sum_m V_nm(y) u_m = (E - eps_n) u_n,   c = hbar^2/(4m).
// The pair barrier is even in y, so the problem splits into even and odd
// parity on y >= 0. Each parity is propagated with the renormalized Numerov
// ratio recursion and matched to flux-normalized asymptotic functions.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "moltunnel/bound_states.hpp"
#include "moltunnel/errors.hpp"
#include "moltunnel/grid.hpp"
#include "moltunnel/potentials.hpp"
#include "moltunnel/units.hpp"

namespace moltunnel {

struct ChannelBasis {
  std::vector<BoundState> states;
  double mass_amu = beryllium_mass_amu;

  /// Lowest `n` numeric Morse states (all bound states when n <= 0).
  static ChannelBasis morse(const MorseParams& p, double mass_amu = beryllium_mass_amu,
                            int n = 5, const MorseGrid& grid = {}) {
    ChannelBasis b;
    b.mass_amu = mass_amu;
    b.states = morse_wavefunctions(p, KineticCoefficient::relative(mass_amu), grid, n);
    if (b.states.empty()) throw domain_error("ChannelBasis: no bound states");
    return b;
  }

  std::size_t size() const { return states.size(); }
  std::vector<double> energies() const {
    std::vector<double> e;
    for (const auto& s : states) e.push_back(s.energy);
    return e;
  }
  /// Largest |<phi_n|phi_m>| over n != m.
  double max_overlap() const {
    double worst = 0;
    for (std::size_t a = 0; a < size(); ++a)
      for (std::size_t b = a + 1; b < size(); ++b) {
        const auto w = simpson_weights(states[a].grid);
        double s = 0;
        for (std::size_t i = 0; i < w.size(); ++i)
          s += w[i] * states[a].psi[i] * states[b].psi[i];
        worst = std::max(worst, std::abs(s));
      }
    return worst;
  }
};

struct CouplingMatrix {
  double y = 0.0;
  Eigen::MatrixXd V;
};

namespace detail {

/// Projection of the pair barrier on the basis with an arbitrary
/// subsampling stride of the basis grid. stride 1 is Simpson on the full grid;
/// stride 2 is the refinement check.
inline Eigen::MatrixXd project_barrier(const ChannelBasis& basis,
                                       const GaussianBarrierParams& b, double y,
                                       std::size_t stride) {
  const std::size_t n = basis.size();
  const UniformGrid& g = basis.states.front().grid;
  UniformGrid coarse{g.start, g.step * static_cast<double>(stride), g.intervals / stride};
  std::vector<double> w;
  if (coarse.intervals % 2 == 0) {
    w = simpson_weights(coarse);
  } else {
    w.assign(coarse.size(), coarse.step);
    w.front() = w.back() = 0.5 * coarse.step;
  }
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const std::size_t j = i * stride;
    const double wv = w[i] * pair_barrier_value(b, y, g.at(j));
    if (wv == 0.0) continue;
    for (std::size_t a = 0; a < n; ++a) {
      const double pa = wv * basis.states[a].psi[j];
      for (std::size_t c = a; c < n; ++c)
        v(static_cast<long>(a), static_cast<long>(c)) += pa * basis.states[c].psi[j];
    }
  }
  return v.selfadjointView<Eigen::Upper>();
}

}  // namespace detail

/// V_nm(y) = integral phi_n(x) [V(y + x/2) + V(y - x/2)] phi_m(x) dx, by
/// Simpson's rule on the basis grid. Checked against the same rule on every
/// second grid point.
inline CouplingMatrix build_coupling(const ChannelBasis& basis,
                                     const GaussianBarrierParams& b, double y) {
  if (basis.size() == 0) throw domain_error("build_coupling: empty basis");
  b.validate();
  CouplingMatrix out{y, detail::project_barrier(basis, b, y, 1)};
  const Eigen::MatrixXd coarse = detail::project_barrier(basis, b, y, 2);
  const double change = (out.V - coarse).cwiseAbs().maxCoeff();
  if (change > 1e-6 * b.V0)
    throw accuracy_error("build_coupling: quadrature not converged at y = " +
                             std::to_string(y),
                         change);
  return out;
}

struct CoupledSettings {
  double y_max = 6.0;   // A
  double step = 2e-3;   // A
  /// Kinetic energy above which results are only qualitative.
  double energy_cap = 1400.0;
};

struct CoupledResult {
  double E = 0.0;    // total energy, relative to separated atoms at rest
  double E_k = 0.0;  // kinetic energy in the entrance channel
  std::vector<double> k;  // |k_n|; decay constant for closed channels
  std::vector<bool> open;
  std::vector<std::complex<double>> T, R;  // amplitudes, W_1n = (k_n/k_1)|T_1n|^2
  std::vector<double> W_n, D_n;
  double W = 0.0, D = 0.0;
};

inline double unitarity_defect(const CoupledResult& r) {
  return std::abs(1.0 - (r.W + r.D));
}

/// Close-coupling solver with the coupling table precomputed on the
/// propagation grid y_i = i*h (no interpolation).
class CoupledSolver {
 public:
  CoupledSolver(ChannelBasis basis, GaussianBarrierParams barrier,
                CoupledSettings s = {})
      : basis_(std::move(basis)),
        barrier_(barrier),
        settings_(s),
        kin_(KineticCoefficient::center_of_mass(basis_.mass_amu)) {
    if (!(s.y_max > 0 && s.step > 0 && s.step < s.y_max))
      throw domain_error("CoupledSettings: need 0 < step < y_max");
    const auto n_steps = static_cast<std::size_t>(std::llround(s.y_max / s.step));
    h_ = s.y_max / static_cast<double>(n_steps);
    last_ = n_steps;
    eps_ = basis_.energies();
    table_.reserve(n_steps + 2);
    for (std::size_t i = 0; i <= n_steps + 1; ++i)
      table_.push_back(build_coupling(basis_, barrier_, h_ * static_cast<double>(i)).V);
    const double edge = table_[last_].cwiseAbs().maxCoeff();
    if (edge > 1e-12 * barrier_.V0)
      throw domain_error("CoupledSolver: coupling not negligible at y_max");
    // Inner boundary for box eigenvalues: the maximum of V_11 on the grid.
    peak_ = 0;
    for (std::size_t i = 0; i <= last_; ++i)
      if (table_[i](0, 0) > table_[peak_](0, 0)) peak_ = i;
  }

  const ChannelBasis& basis() const { return basis_; }
  const GaussianBarrierParams& barrier() const { return barrier_; }
  const CoupledSettings& settings() const { return settings_; }
  std::size_t channels() const { return eps_.size(); }
  double step() const { return h_; }
  const std::vector<double>& thresholds() const { return eps_; }
  /// Kinetic energy at which channel n (0-based) opens.
  double threshold_kinetic(std::size_t n) const { return eps_.at(n) - eps_.front(); }
  const Eigen::MatrixXd& coupling_at(std::size_t i) const { return table_.at(i); }
  double y_at(std::size_t i) const { return h_ * static_cast<double>(i); }
  double barrier_peak() const { return y_at(peak_); }

  /// Scattering with unit flux incident in channel 1 at kinetic energy e_k.
  CoupledResult solve(double e_k) const {
    if (!(e_k > 0)) throw domain_error("solve_coupled: E_k must be positive");
    if (e_k > settings_.energy_cap)
      throw domain_error("solve_coupled: E_k above the validity cap");
    const std::size_t n = channels();
    const double e = e_k + eps_.front();
    CoupledResult r;
    r.E = e;
    r.E_k = e_k;
    r.k.resize(n);
    r.open.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
      const double d = (e - eps_[c]) / kin_.value;
      r.open[c] = d > 0;
      r.k[c] = std::sqrt(std::abs(d));
    }
    if (!r.open[0]) throw domain_error("solve_coupled: entrance channel closed");
    const ParityS ps = parity_s_matrices(e, r);
    r.T.assign(n, 0.0);
    r.R.assign(n, 0.0);
    r.W_n.assign(n, 0.0);
    r.D_n.assign(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      if (!r.open[c]) continue;
      const auto i = static_cast<long>(c);
      const std::complex<double> tf = 0.5 * ps.diff(i, 0);
      const std::complex<double> rf = ps.odd(i, 0) + 0.5 * ps.diff(i, 0);
      const double norm = std::sqrt(r.k[0] / r.k[c]);
      r.T[c] = tf * norm;
      r.R[c] = rf * norm;
      r.W_n[c] = std::norm(tf);
      r.D_n[c] = std::norm(rf);
      r.W += r.W_n[c];
      r.D += r.D_n[c];
    }
    const double defect = unitarity_defect(r);
    if (defect > 1e-5)
      throw accuracy_error("solve_coupled: unitarity defect " + std::to_string(defect),
                           defect);
    return r;
  }

  /// Number of eigenvalues below kinetic energy e_k of the inner problem
  /// (parity condition at y = 0, Dirichlet at the barrier maximum).
  int box_count(double e_k, bool even) const {
    const double e = e_k + eps_.front();
    int count = 0;
    const std::size_t first = even ? 0 : 1;
    Eigen::MatrixXd r;
    for (std::size_t i = first; i < peak_; ++i) {
      const Eigen::MatrixXd u = numerov_u(i, e);
      if (i == first)
        r = even ? Eigen::MatrixXd(0.5 * u) : u;
      else
        r = u - r.inverse();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r, Eigen::EigenvaluesOnly);
      for (long j = 0; j < es.eigenvalues().size(); ++j)
        if (es.eigenvalues()(j) < 0) ++count;
    }
    return count;
  }

  struct BoxLevel {
    double E_k;
    bool even;
  };

  /// Inner-region eigenvalues in (lo, hi), both parities, ascending.
  std::vector<BoxLevel> box_levels(double lo, double hi, double tol = 1e-9) const {
    if (!(hi > lo)) throw domain_error("box_levels: empty range");
    std::vector<BoxLevel> out;
    for (bool even : {true, false}) {
      const int c_lo = box_count(lo, even), c_hi = box_count(hi, even);
      for (int m = c_lo; m < c_hi; ++m) {
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > tol * std::max(1.0, b); ++it) {
          const double mid = 0.5 * (a + b);
          (box_count(mid, even) > m ? b : a) = mid;
        }
        out.push_back({0.5 * (a + b), even});
      }
    }
    std::sort(out.begin(), out.end(),
              [](const BoxLevel& x, const BoxLevel& y) { return x.E_k < y.E_k; });
    return out;
  }

 private:
  Eigen::MatrixXd t_matrix(std::size_t i, double e) const {
    Eigen::MatrixXd t = table_[i];
    for (std::size_t c = 0; c < eps_.size(); ++c)
      t(static_cast<long>(c), static_cast<long>(c)) += eps_[c] - e;
    return (h_ * h_ / (12.0 * kin_.value)) * t;
  }

  Eigen::MatrixXd numerov_u(std::size_t i, double e) const {
    const long n = static_cast<long>(eps_.size());
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    return 12.0 * (id - t_matrix(i, e)).inverse() - 10.0 * id;
  }

  struct ParityS {
    Eigen::MatrixXcd odd;   // S for odd parity
    Eigen::MatrixXcd diff;  // S_even - S_odd, free of cancellation
  };

  // Both parities are propagated together. The difference of the even and
  // odd ratio matrices obeys D_i = (R^o_{i-1})^{-1} D_{i-1} (R^e_{i-1})^{-1},
  // which keeps the exponentially small transmission amplitude accurate.
  ParityS parity_s_matrices(double e, const CoupledResult& r) const {
    const long n = static_cast<long>(eps_.size());
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd u0 = numerov_u(0, e);
    const Eigen::MatrixXd re0_inv = (0.5 * u0).inverse();
    Eigen::MatrixXd ro = numerov_u(1, e);
    Eigen::MatrixXd re = ro - re0_inv;
    Eigen::MatrixXd d = -re0_inv;
    int scale = 0;
    for (std::size_t i = 2; i <= last_; ++i) {
      const Eigen::MatrixXd u = numerov_u(i, e);
      const Eigen::MatrixXd ro_inv = ro.inverse(), re_inv = re.inverse();
      d = ro_inv * d * re_inv;
      ro = u - ro_inv;
      re = u - re_inv;
      const double m = d.cwiseAbs().maxCoeff();
      if (m > 0 && m < 1e-200) {
        d *= std::ldexp(1.0, 600);
        scale += 600;
      }
    }
    const Eigen::MatrixXd p = (id - t_matrix(last_ + 1, e)).inverse();
    const Eigen::MatrixXd q = id - t_matrix(last_, e);
    const double yn = y_at(last_), yn1 = y_at(last_ + 1);
    Eigen::MatrixXcd on = Eigen::MatrixXcd::Zero(n, n), on1 = on, in = on, in1 = on;
    const std::complex<double> i1(0, 1);
    for (long c = 0; c < n; ++c) {
      const double k = r.k[static_cast<std::size_t>(c)];
      if (r.open[static_cast<std::size_t>(c)]) {
        const double s = 1.0 / std::sqrt(k);
        on(c, c) = s * std::exp(i1 * k * yn);
        on1(c, c) = s * std::exp(i1 * k * yn1);
        in(c, c) = s * std::exp(-i1 * k * yn);
        in1(c, c) = s * std::exp(-i1 * k * yn1);
      } else {
        // closed: decaying and growing exponentials scaled to 1 at y_N
        on(c, c) = 1.0;
        on1(c, c) = std::exp(-k * h_);
        in(c, c) = 1.0;
        in1(c, c) = std::exp(k * h_);
      }
    }
    // psi_{N+1} = Z psi_N;  S = -A^{-1} B, A = O_{N+1} - Z O_N, B = I_{N+1} - Z I_N
    const Eigen::MatrixXcd zo = (p * ro * q).cast<std::complex<double>>();
    const Eigen::MatrixXcd ze = (p * re * q).cast<std::complex<double>>();
    const Eigen::MatrixXcd dz = (p * d * q).cast<std::complex<double>>();
    ParityS out;
    out.odd = -(on1 - zo * on).partialPivLu().solve(in1 - zo * in);
    // S_e - S_o = A_e^{-1} (Z_e - Z_o) (I_N + O_N S_o)
    out.diff = (on1 - ze * on).partialPivLu().solve(dz * (in + on * out.odd));
    out.diff *= std::ldexp(1.0, -scale);
    return out;
  }

  ChannelBasis basis_;
  GaussianBarrierParams barrier_;
  CoupledSettings settings_;
  KineticCoefficient kin_;
  double h_ = 0.0;
  std::size_t last_ = 0, peak_ = 0;
  std::vector<double> eps_;
  std::vector<Eigen::MatrixXd> table_;
};

inline CoupledResult solve_coupled(const ChannelBasis& basis,
                                   const GaussianBarrierParams& barrier, double e_k,
                                   CoupledSettings s = {}) {
  return CoupledSolver(basis, barrier, s).solve(e_k);
}

}  // namespace moltunnel
