#include <gtest/gtest.h>

#include <cmath>

#include "moltunnel/thermal.hpp"

using namespace moltunnel;

namespace {

const RigidMolecule& molecule() {
  static const RigidMolecule rm{RigidMoleculeSpec{}};
  return rm;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Kernel, QuadratureMatchesClosedForm) {
  for (double w : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0}) {
    double err = 0;
    EXPECT_LT(rel(kernel_quadrature(w, &err), kernel_closed_form(w)), 1e-8) << w;
    EXPECT_LT(err, 1e-8 * kernel_closed_form(w));
  }
}

TEST(Kernel, SmallOmegaSeries) {
  // 2 pi w/(2 - w) = pi w (1 + w/2 + w^2/4 + ...)
  const double w = 1e-4;
  EXPECT_NEAR(kernel_closed_form(w) / (std::numbers::pi * w), 1 + w / 2 + w * w / 4, 1e-12);
  EXPECT_THROW(kernel_closed_form(0.0), domain_error);
}

TEST(Arrhenius, ValueAtBarrierHeight) {
  EXPECT_NEAR(arrhenius(1200.0, 1200.0), std::exp(-1.0), 1e-16);
  EXPECT_LT(arrhenius(40.0, 1200.0), 1e-13);
  EXPECT_THROW(arrhenius(0.0, 1200.0), domain_error);
}

TEST(Thermal, LogGrid) {
  const auto t = log_grid(20.0, 2500.0, 40);
  ASSERT_EQ(t.size(), 40u);
  EXPECT_DOUBLE_EQ(t.front(), 20.0);
  EXPECT_NEAR(t.back(), 2500.0, 1e-10);
  EXPECT_NEAR(t[1] / t[0], t[39] / t[38], 1e-12);
  EXPECT_THROW(log_grid(0.0, 1.0, 5), domain_error);
}

TEST(Thermal, UnitTransmissionGivesUnitF) {
  EnergyRule r;
  r.add_adaptive([](double) { return 1.0; }, 0.0, 2300.0, 20.0);
  for (double t : {20.0, 300.0, 2500.0}) {
    const double f = r.apply(boltzmann_weight(t).f) + std::exp(-2300.0 / t);
    EXPECT_NEAR(f, 1.0, 1e-10) << t;
  }
}

TEST(Thermal, ResonanceSumApproachesSmoothIntegral) {
  const auto& rm = molecule();
  ThermalOptions o;
  const ThermalModel m(rm, o);
  const auto l = m.ladder();
  const auto f = boltzmann_weight(300.0);
  auto om = [&](double e) { return rm.omega(e); };
  const double sum = resonance_integral(f, l, om);
  const double smooth = smooth_equivalent(f, om, l.minima.front(), l.minima.back());
  EXPECT_NEAR(sum / smooth, 1.0, 1e-2);
}

TEST(Thermal, SmoothCurveMonotoneAndBounded) {
  ThermalOptions o;
  const ThermalModel m(molecule(), o);
  const auto c = m.evaluate(m.smooth_rule(), ThermalVariant::smooth, log_grid(20, 2500, 25));
  for (std::size_t i = 1; i < c.F.size(); ++i) EXPECT_GT(c.F[i], c.F[i - 1]);
  for (double f : c.F) {
    EXPECT_GT(f, 0.0);
    EXPECT_LT(f, 1.0);
  }
}

TEST(Thermal, CutoffDoublingInvariance) {
  ThermalOptions a, b;
  b.E_max = 2 * a.E_max;
  const ThermalModel ma(molecule(), a), mb(molecule(), b);
  const auto temps = log_grid(20, 500, 12);
  const auto fa = ma.evaluate(ma.smooth_rule(), ThermalVariant::smooth, temps);
  const auto fb = mb.evaluate(mb.smooth_rule(), ThermalVariant::smooth, temps);
  for (std::size_t i = 0; i < temps.size(); ++i) EXPECT_LT(rel(fa.F[i], fb.F[i]), 1e-3);
}

TEST(Thermal, RigidCurveTracksSmoothCurve) {
  ThermalOptions o;
  const ThermalModel m(molecule(), o);
  std::vector<std::string> notes;
  const auto temps = log_grid(20, 2000, 16);
  const auto rm = m.evaluate(m.rigid_rule(&notes), ThermalVariant::rigid, temps);
  const auto sm = m.evaluate(m.smooth_rule(), ThermalVariant::smooth, temps);
  EXPECT_FALSE(notes.empty());
  for (std::size_t i = 0; i < temps.size(); ++i) {
    if (temps[i] >= 100) EXPECT_NEAR(rm.F[i] / sm.F[i], 1.0, 0.1) << temps[i];
  }
}

TEST(Thermal, ArrheniusCurve) {
  const ThermalModel m(molecule());
  const auto c = m.arrhenius_curve({600.0, 1200.0});
  EXPECT_EQ(c.variant, ThermalVariant::arrhenius);
  EXPECT_NEAR(c.F[1], std::exp(-1.0), 1e-16);
  EXPECT_EQ(variant_name(ThermalVariant::molecule), "Fm");
}
