#pragma once

#include <cstddef>
#include <vector>

namespace ctops {

/// One node of the F_z = 0 difference-angle phase space.
///
/// `u` is the canonical momentum-like coordinate I_z = δF_z/2 of unit spins,
/// related to the projected-coherent-state angle by u = -sin(δθ/2), where
/// δθ = θ_I - θ_J with θ_I + θ_J = π.
struct GridNode {
  double u = 0.0;
  double delta_phi = 0.0;
  double weight = 0.0;

  double delta_theta() const;
  double delta_fz() const { return 2.0 * u; }
};

double delta_theta_from_u(double u);
double u_from_delta_theta(double delta_theta);

/// Quadrature grid uniform in the canonical pair (u, δφ) ∈ [-1, 1] × [0, 2π).
/// Weights are Liouville cell areas and sum to 4π.
class PhaseSpaceGrid {
 public:
  /// Nodes at cell centres; every weight equals 4π / (n_u n_phi).
  static PhaseSpaceGrid cells(int n_u, int n_phi);

  /// Nodes on the closed interval u ∈ [-1, 1] (rows at the poles included) with
  /// trapezoid weights in u; δφ is periodic so it never includes 2π.
  static PhaseSpaceGrid vertices(int n_u, int n_phi);

  int n_u() const { return n_u_; }
  int n_phi() const { return n_phi_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<GridNode>& nodes() const { return nodes_; }
  const GridNode& operator[](std::size_t i) const { return nodes_[i]; }

  /// Row-major: index = i_u * n_phi + i_phi.
  std::size_t index(int i_u, int i_phi) const { return static_cast<std::size_t>(i_u) * n_phi_ + i_phi; }

  double total_measure() const;

 private:
  PhaseSpaceGrid(int n_u, int n_phi) : n_u_(n_u), n_phi_(n_phi) {}
  int n_u_ = 0;
  int n_phi_ = 0;
  std::vector<GridNode> nodes_;
};

}  // namespace ctops
