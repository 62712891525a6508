#pragma once

#include <cmath>
#include <vector>

#include "moltunnel/errors.hpp"
#include "moltunnel/units.hpp"

namespace moltunnel {

/// Morse interatomic potential U(r) = U0 (e^{-2 rho (r - r_eq)} - 2 e^{-rho (r - r_eq)}).
/// Defaults describe the Be2 van der Waals molecule.
struct MorseParams {
  double U0 = 1280.0;   // well depth, K
  double r_eq = 2.47;   // equilibrium distance, A
  double rho = 2.968;   // inverse range, 1/A

  void validate() const {
    if (!(U0 > 0 && r_eq > 0 && rho > 0))
      throw domain_error("MorseParams: U0, r_eq and rho must be positive");
  }
};

/// Gaussian repulsive barrier V(x) = V0 exp(-(x - center)^2 / (2 sigma)).
/// Note that sigma is a squared length (A^2), not a standard deviation.
struct GaussianBarrierParams {
  double V0 = 1200.0;     // peak height, K
  double sigma = 5.23e-2; // A^2
  double center = 0.0;    // A

  void validate() const {
    if (!(V0 > 0 && sigma > 0))
      throw domain_error("GaussianBarrierParams: V0 and sigma must be positive");
  }
};

/// Morse potential at interatomic coordinate r; the potential is even, U(|r|).
inline double morse_value(const MorseParams& p, double r) {
  const double e = std::exp(-p.rho * (std::abs(r) - p.r_eq));
  return p.U0 * (e * e - 2.0 * e);
}

inline double gaussian_value(const GaussianBarrierParams& p, double x) {
  const double d = x - p.center;
  return p.V0 * std::exp(-d * d / (2.0 * p.sigma));
}

/// Barrier felt by a molecule with centre of mass y and internuclear
/// coordinate x: V(y + x/2) + V(y - x/2).
inline double pair_barrier_value(const GaussianBarrierParams& p, double y,
                                 double x) {
  return gaussian_value(p, y + 0.5 * x) + gaussian_value(p, y - 0.5 * x);
}

/// Morse parameter lambda = sqrt(2 mu U0)/(rho hbar), written with the
/// relative-motion kinetic coefficient c = hbar^2/(2 mu).
inline double morse_lambda(const MorseParams& p, KineticCoefficient relative) {
  p.validate();
  if (!(relative.value > 0))
    throw domain_error("morse_lambda: kinetic coefficient must be positive");
  return std::sqrt(p.U0 / relative.value) / p.rho;
}

/// Analytic Morse bound-state energies, ascending:
/// eps_v = -U0 (1 - (v + 1/2)/lambda)^2 for all v with v + 1/2 < lambda.
/// Empty when lambda <= 1/2.
inline std::vector<double> morse_levels(const MorseParams& p,
                                        KineticCoefficient relative) {
  const double lambda = morse_lambda(p, relative);
  std::vector<double> levels;
  for (int v = 0; v + 0.5 < lambda; ++v) {
    const double q = 1.0 - (v + 0.5) / lambda;
    levels.push_back(-p.U0 * q * q);
  }
  return levels;
}

}  // namespace moltunnel
