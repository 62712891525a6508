#include <gtest/gtest.h>

#include <limits>

#include "moltunnel/units.hpp"

using namespace moltunnel;

TEST(Units, CenterOfMassCoefficientMatchesHandComputation) {
  // hbar^2 / (2 * 2m) for 9Be in K*A^2, evaluated with a calculator.
  const auto c = KineticCoefficient::center_of_mass(beryllium_mass_amu);
  EXPECT_NEAR(c.value, 1.345643, 5e-6);
}

TEST(Units, RelativeIsFourTimesCenterOfMass) {
  const auto com = KineticCoefficient::center_of_mass(beryllium_mass_amu);
  const auto rel = KineticCoefficient::relative(beryllium_mass_amu);
  EXPECT_NEAR(rel.value / com.value, 4.0, 1e-14);
}

TEST(Units, MassFactorScalesInversely) {
  EXPECT_NEAR(mass_factor(2.0) * 2.0, hbar2_per_amu, 1e-15 * hbar2_per_amu);
  EXPECT_NEAR(KineticCoefficient::for_mass(1.0).value, 0.5 * hbar2_per_amu, 1e-15);
}

TEST(Units, HbarSquaredPerAmuValue) {
  // hbar^2/(u A^2 k_B) = 48.5087 K A^2
  EXPECT_NEAR(hbar2_per_amu, 48.508734, 1e-6);
}

TEST(Units, RejectsNonPositiveMass) {
  EXPECT_THROW(mass_factor(0.0), domain_error);
  EXPECT_THROW(mass_factor(-1.0), domain_error);
  EXPECT_THROW(KineticCoefficient::for_mass(std::numeric_limits<double>::infinity()),
               domain_error);
}
