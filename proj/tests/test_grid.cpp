#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ctops/phase_space_grid.hpp"

using namespace ctops;

TEST(PhaseSpaceGrid, CellsMeasureAndLayout) {
  auto g = PhaseSpaceGrid::cells(100, 100);
  EXPECT_EQ(g.size(), 10000u);
  EXPECT_NEAR(g.total_measure(), 4 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(g[0].u, -0.99, 1e-15);
  EXPECT_NEAR(g[g.index(99, 0)].u, 0.99, 1e-15);
  EXPECT_NEAR(g[1].delta_phi - g[0].delta_phi, 2 * std::numbers::pi / 100, 1e-15);
  for (const auto& n : g.nodes()) EXPECT_DOUBLE_EQ(n.weight, 4 * std::numbers::pi / 10000);
}

TEST(PhaseSpaceGrid, VerticesIncludePoles) {
  auto g = PhaseSpaceGrid::vertices(61, 61);
  EXPECT_NEAR(g.total_measure(), 4 * std::numbers::pi, 1e-12);
  EXPECT_DOUBLE_EQ(g[0].u, -1.0);
  EXPECT_DOUBLE_EQ(g[g.index(60, 0)].u, 1.0);
  EXPECT_DOUBLE_EQ(g[0].delta_phi, 0.0);
  EXPECT_LT(g[g.index(0, 60)].delta_phi, 2 * std::numbers::pi);
  EXPECT_NEAR(g[0].weight * 2, g[g.index(1, 0)].weight, 1e-15);
}

TEST(PhaseSpaceGrid, AngleConversion) {
  EXPECT_NEAR(delta_theta_from_u(-1.0), std::numbers::pi, 1e-15);
  EXPECT_NEAR(delta_theta_from_u(1.0), -std::numbers::pi, 1e-15);
  EXPECT_NEAR(delta_theta_from_u(0.0), 0.0, 1e-15);
  for (double u : {-0.9, -0.3, 0.2, 0.77}) EXPECT_NEAR(u_from_delta_theta(delta_theta_from_u(u)), u, 1e-14);
  GridNode n{0.25, 1.0, 0.0};
  EXPECT_DOUBLE_EQ(n.delta_fz(), 0.5);
}

TEST(PhaseSpaceGrid, RejectsBadSizes) {
  EXPECT_THROW(PhaseSpaceGrid::cells(0, 10), std::invalid_argument);
  EXPECT_THROW(PhaseSpaceGrid::vertices(1, 10), std::invalid_argument);
}
