#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <cmath>
#include <numbers>
#include <random>

#include "ctops/entanglement.hpp"

using namespace ctops;

namespace {

constexpr double kPi = std::numbers::pi;

SubspaceSpec sym(int j) { return SubspaceSpec::symmetric(HalfInteger::from_int(j)); }

Eigen::VectorXcd random_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(d);
  for (int k = 0; k < d; ++k) v[k] = {g(rng), g(rng)};
  return v.normalized();
}

// Reduced-density-matrix spectrum of the block state embedded in the full I ⊗ J space.
Eigen::VectorXd svd_schmidt(const SubspaceSpec& spec, const Eigen::VectorXcd& c) {
  const int di = spec.spin_i.twice() + 1, dj = spec.spin_j.twice() + 1;
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(di, dj);
  for (int k = 0; k < spec.dimension(); ++k) {
    const int row = (spec.mi(k) + spec.spin_i).twice() / 2;
    const int col = (spec.mj(k) + spec.spin_j).twice() / 2;
    psi(row, col) = c[k];
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(psi);
  Eigen::VectorXd s = svd.singularValues().cwiseAbs2();
  std::sort(s.data(), s.data() + s.size());
  return s;
}

const FloquetSystem& chaotic150() {
  static const FloquetSystem sys = diagonalize(build_floquet(sym(150), 6.0, kPi / 2));
  return sys;
}

}  // namespace

TEST(Schmidt, BasisAndUniform) {
  auto spec = sym(3);
  auto b = schmidt_coefficients(SubspaceState::basis(spec, 4));
  EXPECT_EQ(b.sum(), 1.0);
  EXPECT_EQ(b[4], 1.0);
  auto u = schmidt_coefficients(SubspaceState::uniform(spec));
  for (int k = 0; k < 7; ++k) EXPECT_NEAR(u[k], 1.0 / 7.0, 1e-15);
}

TEST(Schmidt, MatchesSvdOracle) {
  std::mt19937_64 rng(31);
  for (SubspaceSpec spec : {sym(5), SubspaceSpec{HalfInteger::from_twice(5), HalfInteger::from_int(4), HalfInteger::from_twice(1)}}) {
    for (int t = 0; t < 20; ++t) {
      const auto c = random_state(spec.dimension(), rng);
      Eigen::VectorXd lam = schmidt_coefficients(c);
      std::sort(lam.data(), lam.data() + lam.size());
      const Eigen::VectorXd oracle = svd_schmidt(spec, c);
      const Eigen::VectorXd tail = oracle.tail(lam.size());
      EXPECT_LT((lam - tail).cwiseAbs().maxCoeff(), 1e-10);
      if (oracle.size() > lam.size()) EXPECT_LT(oracle.head(oracle.size() - lam.size()).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_NEAR(entanglement_entropy(c), shannon_entropy(oracle), 1e-10);
    }
  }
}

TEST(Entropy, ClosedForms) {
  auto spec = sym(150);
  EXPECT_EQ(entanglement_entropy(SubspaceState::basis(spec, 0)), 0.0);
  EXPECT_NEAR(entanglement_entropy(SubspaceState::uniform(spec)), std::log(301.0), 1e-12);
  EXPECT_NEAR(std::log(301.0), 5.71, 0.005);
  EXPECT_EQ(linear_entropy(SubspaceState::basis(spec, 7)), 0.0);
  EXPECT_NEAR(linear_entropy(SubspaceState::uniform(spec)), 1.0 - 1.0 / 301.0, 1e-14);
}

TEST(Entropy, BoundsAndPhaseInvariance) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> ph(0.0, 2 * kPi);
  for (int t = 0; t < 50; ++t) {
    auto c = random_state(41, rng);
    const double e = entanglement_entropy(c);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, std::log(41.0));
    Eigen::VectorXcd rotated = c;
    for (int k = 0; k < 41; ++k) rotated[k] *= std::polar(1.0, ph(rng));
    EXPECT_NEAR(entanglement_entropy(rotated), e, 1e-14);
  }
}

TEST(Entropy, ColumnBatch) {
  std::mt19937_64 rng(33);
  Eigen::MatrixXcd m(15, 4);
  for (int c = 0; c < 4; ++c) m.col(c) = random_state(15, rng);
  auto e = column_entropies(m);
  for (int c = 0; c < 4; ++c) EXPECT_DOUBLE_EQ(e[c], entanglement_entropy(Eigen::VectorXcd(m.col(c))));
}

TEST(History, InitialValueAndDeterminism) {
  const auto& sys = chaotic150();
  auto psi = projected_coherent(sys.spec, kPi / 2, kPi / 3);
  auto h0 = entanglement_history(sys, psi, 0);
  ASSERT_EQ(h0.series.size(), 1u);
  EXPECT_NEAR(h0.series[0], entanglement_entropy(psi), 1e-12);
  EXPECT_GT(h0.series[0], 0.0);
  EXPECT_LT(h0.series[0], 3.5);
  auto a = entanglement_history(sys, psi, 40);
  auto b = entanglement_history(sys, psi, 40);
  EXPECT_EQ(a.series, b.series);
  EXPECT_GT(a.series[20], 4.5);
}

TEST(History, SpectralMatchesDirectMultiplication) {
  auto sys = diagonalize(build_floquet(sym(20), 6.0, kPi / 2));
  auto psi = projected_coherent(sys.spec, 0.4, 2.0);
  auto h = entanglement_history(sys, psi, 100);
  SubspaceState s = psi;
  for (int n = 0; n <= 100; ++n) {
    EXPECT_NEAR(h.series[n], entanglement_entropy(s), 1e-8) << n;
    s.amplitudes = sys.matrix * s.amplitudes;
  }
}

TEST(LongTimeAverage, ConstantAndWindow) {
  EntanglementHistory h;
  h.series.assign(400, 2.5);
  EXPECT_DOUBLE_EQ(long_time_average(h), 2.5);
  h.series.resize(310);
  EXPECT_THROW(long_time_average(h), std::invalid_argument);
  EXPECT_THROW(long_time_average(h, {20, 10}), std::invalid_argument);
  for (int n = 0; n < 310; ++n) h.series[n] = n;
  EXPECT_DOUBLE_EQ(long_time_average(h, {10, 20}), 15.0);
}

TEST(LongTimeAverage, GlobalChaosSaturation) {
  const auto& sys = chaotic150();
  auto h = entanglement_history(sys, projected_coherent(sys.spec, kPi / 2, kPi / 3), 320);
  EXPECT_NEAR(long_time_average(h), 5.28, 0.03);
}

TEST(LongTimeAverage, BatchMatchesHistories) {
  auto sys = diagonalize(build_floquet(sym(20), 1.5, kPi / 2));
  auto grid = PhaseSpaceGrid::vertices(5, 7);
  const Eigen::MatrixXcd initial = projected_coherent_matrix(sys.spec, grid);
  auto batch = long_time_averages(sys, initial, {30, 45});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto h = entanglement_history(sys, SubspaceState{sys.spec, initial.col(static_cast<Eigen::Index>(i))}, 45);
    EXPECT_NEAR(batch[static_cast<Eigen::Index>(i)], long_time_average(h, {30, 45}), 1e-12);
  }
}

TEST(EntanglementMap, GlobalChaosIsFlat) {
  auto m = entanglement_map(chaotic150(), PhaseSpaceGrid::vertices(11, 11));
  EXPECT_EQ(m.e_avg.size(), 121u);
  EXPECT_LT(m.weighted_stddev(), 0.05);
  EXPECT_NEAR(m.weighted_mean(), 5.28, 0.05);
}

TEST(EntanglementMap, WeightedStatistics) {
  EntanglementMap m{PhaseSpaceGrid::cells(2, 2), {1.0, 2.0, 3.0, 6.0}, std::nullopt};
  EXPECT_DOUBLE_EQ(m.weighted_mean(), 3.0);
  EXPECT_DOUBLE_EQ(m.weighted_mean({true, false, false, true}), 3.5);
  EXPECT_NEAR(m.weighted_stddev(), std::sqrt(3.5), 1e-14);
  EXPECT_THROW(m.weighted_mean({false, false, false, false}), std::invalid_argument);
}
