#pragma once

// Scalar helpers shared by the solvers. Every propagator is templated on the
// working precision `Real`; `double` is used for scans and `quad` (IEEE
// binary128) for refining resonances whose widths lie far below the double
// resolution of the energy axis.

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <complex>
#include <numbers>

namespace moltunnel {

using quad = boost::multiprecision::float128;

template <class Real>
inline Real pi_v() {
  if constexpr (std::is_same_v<Real, quad>)
    return boost::math::constants::pi<quad>();
  else
    return std::numbers::pi_v<Real>;
}

template <class Real>
inline double to_double(const Real& x) {
  return static_cast<double>(x);
}

/// Returns {C(z), S(z)} with C = cosh(sqrt z), S = sinh(sqrt z)/sqrt z,
/// analytically continued to z < 0 (cos and sin/x). Uses the power series for
/// small |z| so that no transcendental call is needed in quad precision.
template <class Real>
inline std::pair<Real, Real> cosh_sinhc(const Real& z) {
  using std::abs;
  if (abs(z) < Real(0.25)) {
    // Terms fall by at least z/((2k+1)(2k+2)); 12 terms reach 1e-40 at 0.25.
    Real c = 1, s = 1, tc = 1, ts = 1;
    for (int k = 1; k <= 12; ++k) {
      tc *= z / Real((2 * k - 1) * (2 * k));
      ts *= z / Real((2 * k) * (2 * k + 1));
      c += tc;
      s += ts;
    }
    return {c, s};
  }
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  if (z > 0) {
    const Real r = sqrt(z);
    return {cosh(r), sinh(r) / r};
  }
  const Real r = sqrt(-z);
  return {cos(r), sin(r) / r};
}

/// Principal value of x mod 2*pi folded into (-pi, pi].
template <class Real>
inline Real wrap_phase(const Real& x) {
  const Real two_pi = 2 * pi_v<Real>();
  using std::floor;
  Real y = x - two_pi * floor(x / two_pi);
  if (y > pi_v<Real>()) y -= two_pi;
  return y;
}

}  // namespace moltunnel
