#pragma once

// Unit system used throughout the library: hbar = k_B = 1, energies in
// kelvin, lengths in angstrom. Masses enter only through the kinetic
// coefficient hbar^2/(2M) expressed in K*A^2.

#include <cmath>

#include "moltunnel/errors.hpp"

namespace moltunnel {

namespace codata2018 {
inline constexpr double hbar = 1.054571817e-34;            // J s (exact)
inline constexpr double boltzmann = 1.380649e-23;          // J/K (exact)
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double angstrom = 1.0e-10;                // m
}  // namespace codata2018

/// Default atomic mass of 9Be in u. Overridable from the run config.
inline constexpr double beryllium_mass_amu = 9.012182;

/// hbar^2 / (1 u * 1 A^2 * k_B), i.e. hbar^2/m for m = 1 u in K*A^2.
inline constexpr double hbar2_per_amu =
    codata2018::hbar * codata2018::hbar /
    (codata2018::atomic_mass_unit * codata2018::angstrom *
     codata2018::angstrom * codata2018::boltzmann);

/// Coefficient c of the kinetic term in  -c psi'' + V psi = E psi,
/// c = hbar^2 / (2 M) in K*A^2 for the effective mass M of the motion.
struct KineticCoefficient {
  double value;

  /// Motion of a body of total mass `mass_amu`.
  static KineticCoefficient for_mass(double mass_amu);
  /// Centre-of-mass motion of a homonuclear diatomic (M = 2m).
  static KineticCoefficient center_of_mass(double atom_mass_amu) {
    return for_mass(2.0 * atom_mass_amu);
  }
  /// Relative motion of a homonuclear diatomic (reduced mass m/2).
  static KineticCoefficient relative(double atom_mass_amu) {
    return for_mass(0.5 * atom_mass_amu);
  }
};

/// hbar^2/m in K*A^2 for a particle of mass `mass_amu`.
inline double mass_factor(double mass_amu) {
  if (!(mass_amu > 0.0) || !std::isfinite(mass_amu))
    throw domain_error("mass_factor: mass must be positive and finite");
  return hbar2_per_amu / mass_amu;
}

inline KineticCoefficient KineticCoefficient::for_mass(double mass_amu) {
  return {0.5 * mass_factor(mass_amu)};
}

}  // namespace moltunnel
