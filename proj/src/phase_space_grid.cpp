#include "ctops/phase_space_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ctops {

double delta_theta_from_u(double u) { return -2.0 * std::asin(std::clamp(u, -1.0, 1.0)); }

double u_from_delta_theta(double delta_theta) { return -std::sin(0.5 * delta_theta); }

double GridNode::delta_theta() const { return delta_theta_from_u(u); }

PhaseSpaceGrid PhaseSpaceGrid::cells(int n_u, int n_phi) {
  if (n_u < 1 || n_phi < 1) throw std::invalid_argument("phase-space grid needs at least one cell per axis");
  PhaseSpaceGrid grid(n_u, n_phi);
  const double du = 2.0 / n_u;
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  grid.nodes_.reserve(static_cast<std::size_t>(n_u) * n_phi);
  for (int i = 0; i < n_u; ++i) {
    for (int j = 0; j < n_phi; ++j) {
      grid.nodes_.push_back({-1.0 + (i + 0.5) * du, (j + 0.5) * dphi, du * dphi});
    }
  }
  return grid;
}

PhaseSpaceGrid PhaseSpaceGrid::vertices(int n_u, int n_phi) {
  if (n_u < 2 || n_phi < 1) throw std::invalid_argument("vertex grid needs n_u >= 2 and n_phi >= 1");
  PhaseSpaceGrid grid(n_u, n_phi);
  const double du = 2.0 / (n_u - 1);
  const double dphi = 2.0 * std::numbers::pi / n_phi;
  grid.nodes_.reserve(static_cast<std::size_t>(n_u) * n_phi);
  for (int i = 0; i < n_u; ++i) {
    const double u = (i == n_u - 1) ? 1.0 : -1.0 + i * du;
    const double w = (i == 0 || i == n_u - 1) ? 0.5 * du : du;
    for (int j = 0; j < n_phi; ++j) grid.nodes_.push_back({u, j * dphi, w * dphi});
  }
  return grid;
}

double PhaseSpaceGrid::total_measure() const {
  long double total = 0.0L;
  for (const auto& n : nodes_) total += n.weight;
  return static_cast<double>(total);
}

}  // namespace ctops
