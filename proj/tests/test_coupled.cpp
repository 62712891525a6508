#include <gtest/gtest.h>

#include <cmath>

#include "moltunnel/coupled.hpp"
#include "moltunnel/rigid.hpp"

using namespace moltunnel;

namespace {

const ChannelBasis& basis() {
  static const ChannelBasis b = ChannelBasis::morse(MorseParams{});
  return b;
}

const CoupledSolver& solver() {
  static const CoupledSolver cs(basis(), GaussianBarrierParams{});
  return cs;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Coupled, BasisIsOrthonormal) {
  EXPECT_EQ(basis().size(), 5u);
  EXPECT_LT(basis().max_overlap(), 1e-8);
}

TEST(Coupled, CouplingIsSymmetricAndLocalized) {
  const auto& cs = solver();
  for (std::size_t i : {0u, 300u, 617u, 1000u}) {
    const auto& v = cs.coupling_at(i);
    EXPECT_LT((v - v.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
  const auto& edge = cs.coupling_at(static_cast<std::size_t>(6.0 / cs.step()));
  EXPECT_LT(edge.cwiseAbs().maxCoeff(), 1e-12 * 1200.0);
}

TEST(Coupled, DiagonalCouplingEqualsAveragedBarrier) {
  const GaussianBarrierParams b;
  for (double y : {0.0, 0.5, 1.2, 1.9}) {
    const auto v = build_coupling(basis(), b, y).V;
    EXPECT_NEAR(v(0, 0), averaged_barrier(y, basis().states[0], b), 1e-10 * b.V0) << y;
  }
}

TEST(Coupled, ThresholdsFollowMorseLevels) {
  const auto& cs = solver();
  const auto e = basis().energies();
  for (std::size_t n = 0; n < e.size(); ++n)
    EXPECT_DOUBLE_EQ(cs.threshold_kinetic(n), e[n] - e[0]);
  // First excitation threshold near 398 K.
  EXPECT_NEAR(cs.threshold_kinetic(1), 397.88, 0.05);
}

TEST(Coupled, ClosedChannelsCarryNoFlux) {
  const auto& cs = solver();
  for (double ek : {150.0, 397.0, 399.0, 750.0, 1000.0}) {
    const auto r = cs.solve(ek);
    for (std::size_t n = 0; n < cs.channels(); ++n) {
      const bool open = ek > cs.threshold_kinetic(n);
      EXPECT_EQ(static_cast<bool>(r.open[n]), open) << ek << " " << n;
      if (!open) {
        EXPECT_EQ(r.W_n[n], 0.0);
        EXPECT_EQ(r.D_n[n], 0.0);
      }
    }
  }
  EXPECT_GT(solver().solve(900.0).W_n[1], 0.0);
}

TEST(Coupled, FluxConservedFromOneToThousandKelvin) {
  const auto& cs = solver();
  for (int i = 0; i <= 40; ++i) {
    const double ek = 1.0 + 999.0 * i / 40.0;
    EXPECT_LT(unitarity_defect(cs.solve(ek)), 1e-5) << ek;
  }
}

TEST(Coupled, NegligibleBarrierTransmitsFully) {
  GaussianBarrierParams tiny;
  tiny.V0 = 1e-9;
  const CoupledSolver cs(basis(), tiny);
  for (double ek : {5.0, 500.0}) {
    const auto r = cs.solve(ek);
    EXPECT_NEAR(r.W, 1.0, 1e-9);
    EXPECT_NEAR(r.W_n[0], 1.0, 1e-9);
  }
}

TEST(Coupled, SingleChannelReducesToAveragedRigidModel) {
  ChannelBasis one = basis();
  one.states.resize(1);
  CoupledSettings s;
  s.step = 5e-4;
  const CoupledSolver cs(one, GaussianBarrierParams{}, s);
  RigidMoleculeSpec spec;
  spec.ground_state_average = true;
  spec.ground_state = basis().states[0];
  const RigidMolecule rm(spec);
  for (double ek : {50.0, 300.0, 700.0, 1100.0})
    EXPECT_LT(rel(cs.solve(ek).W, rm.amplitudes(ek).W), 1e-6) << ek;
}

TEST(Coupled, ConvergesWithStep) {
  const double ek = 1200.0;
  auto w = [&](double h) {
    CoupledSettings s;
    s.step = h;
    return CoupledSolver(basis(), GaussianBarrierParams{}, s).solve(ek).W;
  };
  const double ref = w(1e-3), mid = w(2e-3), coarse = w(4e-3);
  EXPECT_LT(std::abs(mid - ref), std::abs(coarse - ref));
  EXPECT_LT(rel(mid, ref), 1e-5);
}

TEST(Coupled, InnerRegionLevels) {
  const auto levels = solver().box_levels(0.5, 60.0, 1e-12);
  ASSERT_EQ(levels.size(), 3u);
  EXPECT_NEAR(levels[0].E_k, 6.61771, 2e-5);
  EXPECT_NEAR(levels[1].E_k, 25.33133, 2e-5);
  EXPECT_NEAR(levels[2].E_k, 53.75893, 2e-5);
  EXPECT_TRUE(levels[0].even);
  EXPECT_FALSE(levels[1].even);
  EXPECT_TRUE(levels[2].even);
}

TEST(Coupled, RejectsBadInput) {
  const auto& cs = solver();
  EXPECT_THROW(cs.solve(0.0), domain_error);
  EXPECT_THROW(cs.solve(2000.0), domain_error);
  CoupledSettings s;
  s.y_max = 1.0;  // coupling not negligible at the edge
  EXPECT_THROW(CoupledSolver(basis(), GaussianBarrierParams{}, s), domain_error);
  EXPECT_THROW(ChannelBasis::morse(MorseParams{10.0, 2.47, 2.968}), domain_error);
}
