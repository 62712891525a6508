#pragma once

// Exact single-channel 1D scattering for  -c psi'' + V(y) psi = E psi.
//
// The default propagator is a fourth-order Magnus transfer matrix over
// uniform slices: within each slice the 2x2 generator is evaluated at the two
// Gauss points, so the slice map is unimodular (flux is conserved to rounding)
// and it is exact when V is constant on the slice. Amplitudes are referenced
// to plane waves e^{+-iky} with the origin at y = 0, so a barrier solved at
// its true position carries the matching position phase.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "moltunnel/errors.hpp"
#include "moltunnel/numeric.hpp"
#include "moltunnel/potentials.hpp"
#include "moltunnel/units.hpp"

namespace moltunnel {

enum class ScatterMethod { transfer_matrix, numerov };

struct SolverSettings {
  double y_max = 6.0;   // domain half-width, A
  double step = 1e-3;   // slice width, A
  ScatterMethod method = ScatterMethod::transfer_matrix;
};

/// Transmission/reflection for a wave of unit amplitude incident from the
/// left. W + D = 1 up to the solver tolerance.
struct ScatteringAmplitudes {
  double energy = 0.0;
  std::complex<double> t_amp;
  std::complex<double> r_amp;
  double W = 0.0;
  double D = 0.0;
  double delta = 0.0;  // background phase, sin^2(delta) = W
  bool symmetric = false;  // potential even about y = 0

  double unitarity_defect() const { return std::abs(1.0 - (W + D)); }
};

/// Result of one propagation in working precision Real. `log2_scale` holds
/// the power of two removed from the transfer matrix by renormalization, so
/// the true t is t_scaled * 2^-log2_scale.
template <class Real>
struct TransferResult {
  using complex = std::complex<Real>;
  complex q11, q12, q21, q22;  // plane-wave-basis transfer matrix (scaled)
  long log2_scale = 0;

  complex t() const { return complex(scale_down()) / q22; }
  complex r_left() const { return -q21 / q22; }   // incidence from the left
  complex r_right() const { return q12 / q22; }   // incidence from the right
  Real transmission() const {
    using std::abs;
    const Real a = abs(q22);
    return scale_down() * scale_down() / (a * a);
  }
  Real reflection() const {
    using std::abs;
    const Real a = abs(q21) / abs(q22);
    return a * a;
  }

 private:
  Real scale_down() const {
    if constexpr (std::is_same_v<Real, quad>)
      return boost::multiprecision::ldexp(Real(1), static_cast<int>(-log2_scale));
    else
      return std::ldexp(Real(1), static_cast<int>(-log2_scale));
  }
};

/// Energy-independent tabulation of V on a symmetric slice grid
/// y_j = (j - half) * step. Slices where |V| is negligible at both ends of the
/// domain are skipped: propagation through them is the identity in the
/// plane-wave basis.
class SlicedPotential {
 public:
  SlicedPotential() = default;

  SlicedPotential(const std::function<double(double)>& v, SolverSettings s)
      : settings_(s) {
    if (!(s.y_max > 0 && s.step > 0))
      throw domain_error("SolverSettings: y_max and step must be positive");
    half_ = static_cast<long>(std::llround(s.y_max / s.step));
    if (half_ < 2) throw domain_error("SolverSettings: step too large for y_max");
    h_ = s.y_max / static_cast<double>(half_);
    const double g = 0.5 / std::sqrt(3.0);
    const std::size_t n = static_cast<std::size_t>(2 * half_);
    v1_.resize(n);
    v2_.resize(n);
    nodes_.resize(n + 1);
    for (std::size_t j = 0; j < n; ++j) {
      const double y0 = edge(j);
      v1_[j] = v(y0 + h_ * (0.5 - g));
      v2_[j] = v(y0 + h_ * (0.5 + g));
    }
    for (std::size_t j = 0; j <= n; ++j) nodes_[j] = v(edge(j));
    for (std::size_t j = 0; j < n; ++j)
      vmax_ = std::max({vmax_, std::abs(v1_[j]), std::abs(v2_[j])});
    for (double x : nodes_) vmax_ = std::max(vmax_, std::abs(x));
    vmin_ = 0.0;
    for (std::size_t j = 0; j < n; ++j) vmin_ = std::min({vmin_, v1_[j], v2_[j]});

    edge_level_ = std::max(std::abs(nodes_.front()), std::abs(nodes_.back()));
    const double floor = 1e-17 * vmax_;
    first_ = 0;
    last_ = n;
    while (first_ < last_ && std::abs(v1_[first_]) <= floor &&
           std::abs(v2_[first_]) <= floor)
      ++first_;
    while (last_ > first_ && std::abs(v1_[last_ - 1]) <= floor &&
           std::abs(v2_[last_ - 1]) <= floor)
      --last_;
    symmetric_ = true;
    for (std::size_t j = 0; j < n && symmetric_; ++j) {
      const double tol = 1e-13 * std::max(vmax_, 1e-300);
      if (std::abs(v1_[j] - v2_[n - 1 - j]) > tol) symmetric_ = false;
    }
  }

  double step() const { return h_; }
  long half() const { return half_; }
  std::size_t slices() const { return v1_.size(); }
  double edge(std::size_t j) const {
    return static_cast<double>(static_cast<long>(j) - half_) * h_;
  }
  double vmax() const { return vmax_; }
  double vmin() const { return vmin_; }
  bool symmetric() const { return symmetric_; }
  /// |V| at the domain ends relative to max |V|.
  double edge_ratio() const { return vmax_ > 0 ? edge_level_ / vmax_ : 0.0; }
  std::size_t first_active() const { return first_; }
  std::size_t last_active() const { return last_; }
  std::span<const double> gauss_lo() const { return v1_; }
  std::span<const double> gauss_hi() const { return v2_; }
  std::span<const double> nodes() const { return nodes_; }
  const SolverSettings& settings() const { return settings_; }

  /// Copy restricted to slices [from, to); outside values are zero.
  SlicedPotential restricted(std::size_t from, std::size_t to) const {
    SlicedPotential out = *this;
    for (std::size_t j = 0; j < slices(); ++j)
      if (j < from || j >= to) out.v1_[j] = out.v2_[j] = 0.0;
    for (std::size_t j = 0; j <= slices(); ++j)
      if (j < from || j > to) out.nodes_[j] = 0.0;
    out.first_ = std::max(first_, from);
    out.last_ = std::min(last_, to);
    if (out.last_ < out.first_) out.last_ = out.first_;
    out.symmetric_ = false;
    return out;
  }

 private:
  SolverSettings settings_{};
  long half_ = 0;
  double h_ = 0.0;
  std::vector<double> v1_, v2_, nodes_;
  double vmax_ = 0.0, vmin_ = 0.0, edge_level_ = 0.0;
  std::size_t first_ = 0, last_ = 0;
  bool symmetric_ = false;
};

/// Magnus-4 propagation of [psi, psi'] across slices [from, to) of `pot`,
/// returned in the plane-wave basis referenced to the slice-range ends.
template <class Real>
TransferResult<Real> propagate(const SlicedPotential& pot, KineticCoefficient kin,
                               const Real& energy, std::size_t from,
                               std::size_t to) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  using complex = std::complex<Real>;
  const Real c = kin.value;
  const Real h = pot.step();
  const Real alpha_k = sqrt(Real(3)) * h * h / Real(12);
  from = std::max(from, pot.first_active());
  to = std::min(to, pot.last_active());
  Real m11 = 1, m12 = 0, m21 = 0, m22 = 1;
  long scale = 0;
  const auto lo = pot.gauss_lo();
  const auto hi = pot.gauss_hi();
  for (std::size_t j = from; j < to; ++j) {
    const Real w1 = (Real(lo[j]) - energy) / c;
    const Real w2 = (Real(hi[j]) - energy) / c;
    const Real a = alpha_k * (w1 - w2);
    const Real wb = (w1 + w2) / 2;
    const auto [C, S] = cosh_sinhc<Real>(a * a + h * h * wb);
    // exp(Omega) with Omega = [[a, h], [h*wb, -a]].
    const Real e11 = C + S * a, e12 = S * h, e21 = S * h * wb, e22 = C - S * a;
    const Real n11 = e11 * m11 + e12 * m21, n12 = e11 * m12 + e12 * m22;
    const Real n21 = e21 * m11 + e22 * m21, n22 = e21 * m12 + e22 * m22;
    m11 = n11, m12 = n12, m21 = n21, m22 = n22;
    using std::abs;
    if (abs(m11) + abs(m12) + abs(m21) + abs(m22) > Real(1e150)) {
      const Real f = Real(std::ldexp(1.0, -498));
      m11 *= f, m12 *= f, m21 *= f, m22 *= f;
      scale += 498;
    }
  }
  const Real k = sqrt(energy / c);
  const Real yl = Real(pot.edge(from)), yr = Real(pot.edge(std::max(from, to)));
  auto phase = [](const Real& x) { return complex(cos(x), sin(x)); };
  const complex i(0, 1);
  const Real half = Real(1) / 2;
  TransferResult<Real> out;
  out.log2_scale = scale;
  out.q22 = phase(k * (yr - yl)) * half * complex(m11 + m22, m21 / k - k * m12);
  out.q21 = phase(k * (yr + yl)) * half * complex(m11 - m22, k * m12 + m21 / k);
  out.q12 = phase(-k * (yr + yl)) * half * complex(m11 - m22, -k * m12 - m21 / k);
  out.q11 = phase(-k * (yr - yl)) * half * complex(m11 + m22, k * m12 - m21 / k);
  return out;
}

template <class Real>
TransferResult<Real> propagate(const SlicedPotential& pot, KineticCoefficient kin,
                               const Real& energy) {
  return propagate<Real>(pot, kin, energy, 0, pot.slices());
}

namespace detail {

/// Numerov integration from the right (pure transmitted wave) to the left on
/// the slice nodes, matched to continuum plane waves at the two outermost
/// nodes on each side. Independent of the Magnus path.
inline std::pair<std::complex<double>, std::complex<double>> numerov_amplitudes(
    const SlicedPotential& pot, KineticCoefficient kin, double e) {
  using complex = std::complex<double>;
  const auto v = pot.nodes();
  const std::size_t n = v.size() - 1;
  const double h = pot.step();
  const double k = std::sqrt(e / kin.value);
  auto tcoef = [&](std::size_t j) { return h * h / 12.0 * (v[j] - e) / kin.value; };
  const complex i(0, 1);
  std::vector<complex> psi(n + 1);
  psi[n] = std::exp(i * k * pot.edge(n));
  psi[n - 1] = std::exp(i * k * pot.edge(n - 1));
  for (std::size_t j = n - 1; j > 0; --j) {
    const double tp = tcoef(j + 1), t0 = tcoef(j), tm = tcoef(j - 1);
    psi[j - 1] = ((2.0 + 10.0 * t0) * psi[j] - (1.0 - tp) * psi[j + 1]) / (1.0 - tm);
  }
  // psi_j = A e^{iky_j} + B e^{-iky_j} at j = 0, 1.
  const double y0 = pot.edge(0), y1 = pot.edge(1);
  const complex a00 = std::exp(i * k * y0), a01 = std::exp(-i * k * y0);
  const complex a10 = std::exp(i * k * y1), a11 = std::exp(-i * k * y1);
  const complex det = a00 * a11 - a01 * a10;
  const complex A = (psi[0] * a11 - a01 * psi[1]) / det;
  const complex B = (a00 * psi[1] - psi[0] * a10) / det;
  return {1.0 / A, B / A};
}

}  // namespace detail

/// Background phase of a symmetric barrier: delta in (0, pi/2] with
/// sin^2(delta) = W.
inline double extract_delta(const ScatteringAmplitudes& a) {
  if (!a.symmetric)
    throw unsupported_input(
        "extract_delta: barrier must be symmetric about the origin");
  const double w = std::clamp(a.W, 0.0, 1.0);
  return std::asin(std::sqrt(w));
}

/// Residual of the two-parameter form t = -i sin(d) e^{i(d+phi0)},
/// r = +-cos(d) e^{i(d+phi0)}, with phi0 taken from t. Only products of
/// reflection amplitudes enter the two-barrier law, so the overall sign of r
/// is a convention and both signs are accepted.
inline double delta_residual(const ScatteringAmplitudes& a) {
  const double d = extract_delta(a);
  const std::complex<double> i(0, 1);
  if (std::abs(a.t_amp) == 0.0) return std::abs(std::abs(a.r_amp) - 1.0);
  const double phi0 = std::arg(a.t_amp) + 0.5 * std::numbers::pi - d;
  const std::complex<double> pred = std::cos(d) * std::exp(i * (d + phi0));
  return std::min(std::abs(a.r_amp - pred), std::abs(a.r_amp + pred));
}

/// Reusable solver for one potential: tabulates V once, then solves any
/// number of energies.
class Scatterer {
 public:
  Scatterer(const std::function<double(double)>& v, KineticCoefficient kin,
            SolverSettings s = {})
      : pot_(v, s), kin_(kin) {
    if (!(kin.value > 0)) throw domain_error("Scatterer: kinetic coefficient must be positive");
    if (pot_.edge_ratio() > 1e-12)
      throw domain_error("Scatterer: potential not localized within +-y_max (|V(edge)|/max|V| = " +
                         std::to_string(pot_.edge_ratio()) + ")");
  }
  Scatterer(SlicedPotential pot, KineticCoefficient kin) : pot_(std::move(pot)), kin_(kin) {}

  const SlicedPotential& potential() const { return pot_; }
  KineticCoefficient kinetic() const { return kin_; }

  template <class Real = double>
  TransferResult<Real> transfer(const Real& e) const {
    if (!(e > 0)) throw domain_error("transmit: energy must be positive");
    return propagate<Real>(pot_, kin_, e);
  }

  ScatteringAmplitudes solve(double e) const {
    if (!(e > 0)) throw domain_error("transmit: energy must be positive");
    const double kmax = std::sqrt((e - std::min(pot_.vmin(), 0.0)) / kin_.value);
    if (kmax * pot_.step() > 2.0 * std::numbers::pi / 40.0)
      throw domain_error("transmit: step resolves the local wavelength by fewer than 40 points");
    ScatteringAmplitudes a;
    a.energy = e;
    a.symmetric = pot_.symmetric();
    if (pot_.settings().method == ScatterMethod::numerov) {
      const auto [t, r] = detail::numerov_amplitudes(pot_, kin_, e);
      a.t_amp = t;
      a.r_amp = r;
      a.W = std::norm(t);
      a.D = std::norm(r);
    } else {
      const auto q = propagate<double>(pot_, kin_, e);
      a.t_amp = q.t();
      a.r_amp = q.r_left();
      a.W = q.transmission();
      a.D = q.reflection();
      // Near a sharp resonance the transfer matrix cancels to O(1) from huge
      // entries; repeat in quad precision before giving up.
      if (a.unitarity_defect() > 1e-9) {
        const auto qq = propagate<quad>(pot_, kin_, quad(e));
        const auto t = qq.t(), r = qq.r_left();
        a.t_amp = {static_cast<double>(t.real()), static_cast<double>(t.imag())};
        a.r_amp = {static_cast<double>(r.real()), static_cast<double>(r.imag())};
        a.W = static_cast<double>(qq.transmission());
        a.D = static_cast<double>(qq.reflection());
      }
    }
    if (a.unitarity_defect() > 1e-6)
      throw accuracy_error("transmit: unitarity defect " +
                               std::to_string(a.unitarity_defect()),
                           a.unitarity_defect());
    a.delta = a.symmetric ? extract_delta(a) : 0.0;
    return a;
  }

 private:
  SlicedPotential pot_;
  KineticCoefficient kin_;
};

/// One-shot transmission of a potential at energy e.
inline ScatteringAmplitudes transmit(const std::function<double(double)>& v,
                                     KineticCoefficient kin, double e,
                                     SolverSettings s = {}) {
  return Scatterer(v, kin, s).solve(e);
}

/// Transmission probability omega(E) of a particle of mass 2m through one
/// Gaussian barrier.
class SingleBarrier {
 public:
  SingleBarrier(GaussianBarrierParams b, double atom_mass_amu, SolverSettings s = {})
      : barrier_(b),
        scat_([b](double y) { return gaussian_value(b, y); },
              KineticCoefficient::center_of_mass(atom_mass_amu), s) {
    b.validate();
  }

  double omega(double e) const { return scat_.solve(e).W; }
  template <class Real>
  Real omega_in(const Real& e) const {
    return scat_.transfer<Real>(e).transmission();
  }
  ScatteringAmplitudes amplitudes(double e) const { return scat_.solve(e); }
  const Scatterer& scatterer() const { return scat_; }
  const GaussianBarrierParams& barrier() const { return barrier_; }

 private:
  GaussianBarrierParams barrier_;
  Scatterer scat_;
};

inline double omega(double e, const GaussianBarrierParams& b = {},
                    double atom_mass_amu = beryllium_mass_amu,
                    SolverSettings s = {}) {
  return SingleBarrier(b, atom_mass_amu, s).omega(e);
}

}  // namespace moltunnel
