#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "ctops/angular.hpp"
#include "ctops/phase_space_grid.hpp"

namespace ctops {

/// Pure state of a fixed-F_z block, amplitudes c_{m_J} with m_J ascending.
struct SubspaceState {
  SubspaceSpec spec;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
  static SubspaceState basis(const SubspaceSpec& spec, int index);
  static SubspaceState uniform(const SubspaceSpec& spec);
};

/// Single-spin coherent state |θ, φ⟩ over m = -J … J (ascending), evaluated in
/// log space. θ = π is the limit with all weight on m = -J.
Eigen::VectorXcd spin_coherent(HalfInteger spin, double theta, double phi);

/// Product of two coherent states projected onto the equal-spin M_F = 0 block
/// and renormalised: c_m ∝ r^m C(2J, J - m) e^{i m δφ}, r = (1 + sin(δθ/2)) / (1 - sin(δθ/2)).
/// δθ = ±π give the single basis states m_J = ±J.
SubspaceState projected_coherent(const SubspaceSpec& spec, double delta_theta, double delta_phi);

/// Columns are the projected coherent states at every grid node.
Eigen::MatrixXcd projected_coherent_matrix(const SubspaceSpec& spec, const PhaseSpaceGrid& grid);

/// Q(node) = |⟨δθ, δφ|ψ⟩|².
std::vector<double> husimi(const SubspaceState& state, const PhaseSpaceGrid& grid);

/// S_Q = -Σ w_i q_i ln q_i with q normalised so that Σ w_i q_i = 1.
/// Throws std::invalid_argument for negative entries or an all-zero Q.
double husimi_entropy(const std::vector<double>& q, const PhaseSpaceGrid& grid);

/// Husimi entropies of many states (columns of `states`) on one grid, streamed
/// over grid chunks so the full Q table is never stored.
Eigen::VectorXd husimi_entropies(const SubspaceSpec& spec, const Eigen::MatrixXcd& states, const PhaseSpaceGrid& grid);

double jz_expectation(const SubspaceState& state);

/// ⟨I_+ J_-⟩, the block-preserving flip-flop correlator; for a localised
/// equal-spin state it approaches J² sinθ_I sinθ_J e^{iδφ}.
std::complex<double> flip_flop_expectation(const SubspaceState& state);

}  // namespace ctops
