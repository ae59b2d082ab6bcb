#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/LU>

#include "ctops/classical.hpp"

using namespace ctops;
using namespace ctops::classical;

namespace {

constexpr double kPi = std::numbers::pi;

ClassicalSpinPair random_pair(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 a(g(rng), g(rng), g(rng)), b(g(rng), g(rng), g(rng));
  return {a.normalized(), b.normalized()};
}

SectionPoint random_section_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> fz(-1.9, 1.9), phi(0.0, 2.0 * kPi);
  return {fz(rng), phi(rng)};
}

double max_diff(const ClassicalSpinPair& a, const ClassicalSpinPair& b) {
  return (a.stacked() - b.stacked()).cwiseAbs().maxCoeff();
}

// Benettin two-trajectory estimate with periodic renormalisation of the separation.
double two_trajectory_lyapunov(const ClassicalMapParams& p, const SectionPoint& ic, int n_steps) {
  const double d0 = 1e-9;
  ClassicalSpinPair x = section_embed(ic);
  SectionPoint shifted = ic;
  shifted.delta_phi += d0;
  ClassicalSpinPair y = section_embed(shifted);
  double sep = (y.stacked() - x.stacked()).norm();
  y = ClassicalSpinPair::from_stacked(x.stacked() + (y.stacked() - x.stacked()) * (d0 / sep));
  double log_sum = 0.0;
  for (int n = 1; n <= n_steps; ++n) {
    x = floquet_step(x, p);
    y = floquet_step(y, p);
    if (n % 10 == 0) {
      const Vec6 diff = y.stacked() - x.stacked();
      const double dist = diff.norm();
      log_sum += std::log(dist / d0);
      ClassicalSpinPair z = ClassicalSpinPair::from_stacked(x.stacked() + diff * (d0 / dist));
      y = {z.i_vec.normalized(), z.j_vec.normalized()};
    }
  }
  return log_sum / n_steps;
}

}  // namespace

TEST(KickRotate, SpinAlongAxisUnchanged) {
  ClassicalSpinPair s{Vec3(0.6, 0.0, 0.8), Vec3::UnitZ()};
  EXPECT_LT(max_diff(kick_rotate(s, kPi / 2), s), 1e-15);
}

TEST(KickRotate, ZeroAngleIsIdentity) {
  std::mt19937_64 rng(1);
  auto s = random_pair(rng);
  EXPECT_EQ(kick_rotate(s, 0.0).stacked(), s.stacked());
}

TEST(KickRotate, RightHandedQuarterTurn) {
  ClassicalSpinPair s{Vec3::UnitZ(), Vec3::UnitX()};
  auto r = kick_rotate(s, kPi / 2);
  EXPECT_NEAR(r.j_vec.x(), 0.0, 1e-15);
  EXPECT_NEAR(r.j_vec.y(), 1.0, 1e-15);
  EXPECT_EQ(r.i_vec, s.i_vec);
}

TEST(KickRotate, PreservesJz) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    auto s = random_pair(rng);
    EXPECT_NEAR(kick_rotate(s, 1.234).j_vec.z(), s.j_vec.z(), 1e-12);
  }
}

TEST(Precess, ParallelSpinsUnchanged) {
  ClassicalSpinPair s{Vec3::UnitX(), Vec3::UnitX()};
  EXPECT_LT(max_diff(precess(s, 6.0), s), 1e-15);
}

TEST(Precess, AntiparallelIsSingularLimit) {
  ClassicalSpinPair s{Vec3::UnitZ(), -Vec3::UnitZ()};
  EXPECT_EQ(precess(s, 6.0).stacked(), s.stacked());
}

TEST(Precess, ConservesNormsFzAndCoupling) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    auto s = random_pair(rng);
    auto r = precess(s, 6.0);
    EXPECT_NEAR(r.i_vec.norm(), 1.0, 1e-12);
    EXPECT_NEAR(r.j_vec.norm(), 1.0, 1e-12);
    EXPECT_NEAR(r.fz(), s.fz(), 1e-12);
    EXPECT_NEAR(r.i_vec.dot(r.j_vec), s.i_vec.dot(s.j_vec), 1e-12);
  }
}

TEST(FloquetStep, FixedPointExactlyInvariant) {
  ClassicalSpinPair s{Vec3::UnitZ(), -Vec3::UnitZ()};
  for (double a : {0.5, 1.5, 6.0}) {
    for (double b : {0.0, kPi / 2, 2.0}) {
      EXPECT_EQ(floquet_step(s, {a, b}).stacked(), s.stacked());
    }
  }
}

TEST(FloquetStep, TrivialParametersAreIdentity) {
  std::mt19937_64 rng(4);
  auto s = random_pair(rng);
  EXPECT_LT(max_diff(floquet_step(s, {0.0, 0.0}), s), 1e-15);
}

TEST(FloquetStep, InverseRoundTrip) {
  std::mt19937_64 rng(5);
  ClassicalMapParams p{6.0, kPi / 2};
  for (int t = 0; t < 20; ++t) {
    auto s = random_pair(rng);
    EXPECT_LT(max_diff(inverse_floquet_step(floquet_step(s, p), p), s), 1e-12);
  }
}

TEST(FloquetStep, ThousandStepRoundTripOnRegularOrbits) {
  for (ClassicalMapParams p : {ClassicalMapParams{0.5, kPi / 2}, ClassicalMapParams{0.0, kPi / 2}}) {
    auto s0 = section_embed({0.7, 1.1});
    auto s = s0;
    for (int n = 0; n < 1000; ++n) s = floquet_step(s, p);
    for (int n = 0; n < 1000; ++n) s = inverse_floquet_step(s, p);
    EXPECT_LT(max_diff(s, s0), 1e-10);
  }
}

TEST(FloquetStep, ShortRoundTripOnChaoticOrbit) {
  ClassicalMapParams p{6.0, kPi / 2};
  auto s0 = section_embed({0.0, kPi / 3});
  auto s = s0;
  for (int n = 0; n < 10; ++n) s = floquet_step(s, p);
  for (int n = 0; n < 10; ++n) s = inverse_floquet_step(s, p);
  EXPECT_LT(max_diff(s, s0), 1e-10);
}

TEST(FloquetStep, LongRunConservation) {
  for (double a : {0.5, 1.5, 6.0}) {
    ClassicalMapParams p{a, kPi / 2};
    auto s = section_embed({0.3, 2.0});
    double drift = 0.0;
    for (int n = 0; n < 10000; ++n) {
      s = floquet_step(s, p);
      drift = std::max({drift, std::abs(s.i_vec.norm() - 1.0), std::abs(s.j_vec.norm() - 1.0), std::abs(s.fz())});
    }
    EXPECT_LT(drift, 1e-10) << "alpha " << a;
  }
}

TEST(FloquetStep, CanonicalJacobianIsUnimodular) {
  std::mt19937_64 rng(6);
  ClassicalMapParams p{1.5, kPi / 2};
  for (int t = 0; t < 100; ++t) {
    auto s = random_pair(rng);
    if (std::abs(s.i_vec.z()) > 0.95 || std::abs(s.j_vec.z()) > 0.95) continue;
    EXPECT_NEAR(canonical_jacobian(s, p).determinant(), 1.0, 1e-6);
  }
}

TEST(Section, PoleEmbedding) {
  auto s = section_embed({2.0, 1.234});
  EXPECT_LT((s.i_vec - Vec3::UnitZ()).norm(), 1e-15);
  EXPECT_LT((s.j_vec + Vec3::UnitZ()).norm(), 1e-15);
}

TEST(Section, EquatorAlignedAzimuths) {
  auto s = section_embed({0.0, 0.0});
  EXPECT_NEAR(s.i_vec.z(), 0.0, 1e-15);
  EXPECT_NEAR(s.j_vec.z(), 0.0, 1e-15);
  EXPECT_NEAR(s.i_vec.dot(s.j_vec), 1.0, 1e-15);
}

TEST(Section, EmbedProjectRoundTrip) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    auto p = random_section_point(rng);
    auto q = section_project(section_embed(p));
    EXPECT_NEAR(q.delta_fz, p.delta_fz, 1e-12);
    EXPECT_NEAR(std::remainder(q.delta_phi - p.delta_phi, 2 * kPi), 0.0, 1e-12);
  }
}

TEST(Section, Errors) {
  EXPECT_THROW(section_embed({2.5, 0.0}), std::invalid_argument);
  EXPECT_THROW(section_project({Vec3::UnitZ(), Vec3::UnitZ()}), std::invalid_argument);
}

TEST(Poincare, FixedPointOrbitRepeats) {
  std::vector<SectionPoint> ic{{2.0, 0.0}};
  auto orbits = poincare_section({1.5, kPi / 2}, ic, 50);
  ASSERT_EQ(orbits.size(), 1u);
  ASSERT_EQ(orbits[0].size(), 51u);
  for (const auto& p : orbits[0]) EXPECT_DOUBLE_EQ(p.delta_fz, 2.0);
}

TEST(Poincare, RegularOrbitCoversLittle) {
  std::vector<SectionPoint> ic{{0.5, 1.0}};
  auto orbits = poincare_section({0.5, kPi / 2}, ic, 100000);
  EXPECT_LT(section_occupancy(orbits[0], 20), 0.2);
}

TEST(Poincare, ChaoticOrbitFillsSection) {
  std::vector<SectionPoint> ic{{0.0, kPi / 3}};
  auto orbits = poincare_section({6.0, kPi / 2}, ic, 100000);
  EXPECT_GT(section_occupancy(orbits[0], 20), 0.9);
}

TEST(Lyapunov, IntegrableIsZero) {
  EXPECT_LT(std::abs(lyapunov_exponent({0.0, kPi / 2}, {0.4, 1.0}, 2000)), 0.01);
}

TEST(Lyapunov, RegularIsSmall) {
  for (SectionPoint ic : {SectionPoint{0.5, 1.0}, SectionPoint{-0.8, 4.0}, SectionPoint{1.2, 2.5}}) {
    EXPECT_LT(lyapunov_exponent({0.5, kPi / 2}, ic, 2000), 0.02);
  }
}

TEST(Lyapunov, ChaoticMatchesTwoTrajectoryOracle) {
  ClassicalMapParams p{6.0, kPi / 2};
  SectionPoint ic{0.0, kPi / 3};
  const double tangent = lyapunov_exponent(p, ic, 5000);
  const double oracle = two_trajectory_lyapunov(p, ic, 5000);
  EXPECT_GT(tangent, 0.5);
  EXPECT_LT(tangent, 1.5);
  EXPECT_NEAR(tangent, oracle, 0.1 * oracle);
}

TEST(Lyapunov, RejectsShortRuns) {
  EXPECT_THROW(lyapunov_exponent({6.0, 1.0}, {0.0, 0.0}, 50), std::invalid_argument);
}

TEST(Classify, ChaoticFractions) {
  auto grid = PhaseSpaceGrid::vertices(21, 21);
  ClassificationOptions opts;
  EXPECT_LE(classify_grid({0.5, kPi / 2}, grid, opts).chaotic_measure_fraction(), 0.05);
  const double mixed = classify_grid({1.5, kPi / 2}, grid, opts).chaotic_measure_fraction();
  EXPECT_GE(mixed, 0.2);
  EXPECT_LE(mixed, 0.8);
  EXPECT_GE(classify_grid({6.0, kPi / 2}, grid, opts).chaotic_measure_fraction(), 0.95);
}
