#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "moltunnel/bound_states.hpp"
#include "moltunnel/potentials.hpp"

using namespace moltunnel;

namespace {
const KineticCoefficient kRel = KineticCoefficient::relative(beryllium_mass_amu);
}

TEST(Morse, MinimumAtEquilibrium) {
  const MorseParams p;
  EXPECT_DOUBLE_EQ(morse_value(p, p.r_eq), -p.U0);
  EXPECT_LT(morse_value(p, p.r_eq), morse_value(p, p.r_eq + 0.01));
  EXPECT_LT(morse_value(p, p.r_eq), morse_value(p, p.r_eq - 0.01));
  EXPECT_NEAR(morse_value(p, 50.0), 0.0, 1e-40);
  EXPECT_DOUBLE_EQ(morse_value(p, -3.0), morse_value(p, 3.0));
}

TEST(Morse, LambdaFromIndependentFormula) {
  // lambda = sqrt(U0 / c_rel) / rho with c_rel from CODATA constants.
  EXPECT_NEAR(morse_lambda(MorseParams{}, kRel), 5.1957243, 1e-6);
}

TEST(Morse, FiveLevelsNearPublishedSpectrum) {
  const auto e = morse_levels(MorseParams{}, kRel);
  ASSERT_EQ(e.size(), 5u);
  const std::array<double, 5> published{-1044.88, -646.16, -342.79, -134.78, -22.13};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(e[i], published[i], 2.0) << i;
}

TEST(Morse, AnalyticLevelsFrozen) {
  const auto e = morse_levels(MorseParams{}, kRel);
  const std::array<double, 5> oracle{-1045.4973904, -647.6150031, -344.5630582, -136.3415557,
                                     -22.9504957};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(e[i], oracle[i], 1e-6) << i;
}

TEST(Morse, LevelCountFollowsLambda) {
  MorseParams shallow;
  shallow.U0 = 10.0;  // lambda = 0.46
  EXPECT_TRUE(morse_levels(shallow, kRel).empty());
  shallow.U0 = 50.0;  // lambda = 1.03
  EXPECT_EQ(morse_levels(shallow, kRel).size(), 1u);
}

TEST(Morse, LevelsAscendAndStayBound) {
  const auto e = morse_levels(MorseParams{}, kRel);
  for (std::size_t i = 1; i < e.size(); ++i) EXPECT_GT(e[i], e[i - 1]);
  for (double x : e) {
    EXPECT_LT(x, 0.0);
    EXPECT_GT(x, -MorseParams{}.U0);
  }
}

TEST(Morse, NumericLevelsMatchAnalytic) {
  const auto a = morse_levels(MorseParams{}, kRel);
  const auto s = morse_wavefunctions(MorseParams{}, kRel);
  ASSERT_EQ(s.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(s[i].energy, a[i], 1e-4) << i;
    EXPECT_EQ(s[i].sign_changes(), static_cast<int>(i)) << i;
  }
}

TEST(Morse, WavefunctionsNormalized) {
  for (const auto& s : morse_wavefunctions(MorseParams{}, kRel)) {
    const auto w = simpson_weights(s.grid);
    double norm = 0;
    for (std::size_t i = 0; i < w.size(); ++i) norm += w[i] * s.psi[i] * s.psi[i];
    EXPECT_NEAR(norm, 1.0, 1e-10);
  }
}

TEST(Morse, ValidationRejectsNonPositive) {
  MorseParams p;
  p.rho = 0.0;
  EXPECT_THROW(p.validate(), domain_error);
  EXPECT_THROW(morse_levels(p, kRel), domain_error);
}

TEST(Gaussian, PeakAndWidth) {
  const GaussianBarrierParams b;
  EXPECT_DOUBLE_EQ(gaussian_value(b, 0.0), 1200.0);
  // sigma is the variance in A^2: V(sqrt(sigma)) = V0 / sqrt(e)
  EXPECT_NEAR(gaussian_value(b, std::sqrt(b.sigma)), 1200.0 * std::exp(-0.5), 1e-10);
  EXPECT_DOUBLE_EQ(gaussian_value(b, 0.3), gaussian_value(b, -0.3));
}

TEST(Gaussian, PairBarrierSymmetricInBothCoordinates) {
  const GaussianBarrierParams b;
  const double x = 2.47;
  for (double y : {0.0, 0.4, 1.235, 2.0}) {
    EXPECT_DOUBLE_EQ(pair_barrier_value(b, y, x), pair_barrier_value(b, -y, x));
    EXPECT_DOUBLE_EQ(pair_barrier_value(b, y, x), pair_barrier_value(b, y, -x));
  }
  EXPECT_NEAR(pair_barrier_value(b, 0.5 * x, x), 1200.0, 1e-9);
}

TEST(Gaussian, ValidationRejectsNonPositive) {
  GaussianBarrierParams b;
  b.sigma = -1;
  EXPECT_THROW(b.validate(), domain_error);
  b = {};
  b.V0 = 0;
  EXPECT_THROW(b.validate(), domain_error);
}
