#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "ctops/floquet.hpp"
#include "ctops/phase_space_grid.hpp"
#include "ctops/states.hpp"

namespace ctops {

// Schmidt coefficients of a fixed-F_z block state are |c_{m_J}|².

Eigen::VectorXd schmidt_coefficients(const Eigen::VectorXcd& amplitudes);
inline Eigen::VectorXd schmidt_coefficients(const SubspaceState& s) { return schmidt_coefficients(s.amplitudes); }

/// Shannon entropy (natural log) of a probability vector; 0 ln 0 = 0.
double shannon_entropy(const Eigen::VectorXd& p);

double entanglement_entropy(const Eigen::VectorXcd& amplitudes);
inline double entanglement_entropy(const SubspaceState& s) { return entanglement_entropy(s.amplitudes); }

double linear_entropy(const Eigen::VectorXcd& amplitudes);
inline double linear_entropy(const SubspaceState& s) { return linear_entropy(s.amplitudes); }

/// Entanglement of every column of `states`.
Eigen::VectorXd column_entropies(const Eigen::MatrixXcd& states);

struct EntanglementHistory {
  double alpha = 0.0;
  double beta = 0.0;
  HalfInteger spin;
  std::optional<double> delta_theta;
  std::optional<double> delta_phi;
  std::vector<double> series;  // E_n, n = 0 … n_max
};

/// E_n from λ_m^{(n)} = |Σ_k a_k e^{-inφ_k} c^{(k)}_m|², a_k = ⟨k|ψ₀⟩.
EntanglementHistory entanglement_history(const FloquetSystem& system, const SubspaceState& initial, int n_max);

/// Inclusive step range; the default drops the first 300 steps and averages 300…320.
struct TimeWindow {
  int first = 300;
  int last = 320;
};

double long_time_average(const EntanglementHistory& history, TimeWindow window = {});

/// Long-time averages for many initial states at once (columns of `initial`).
Eigen::VectorXd long_time_averages(const FloquetSystem& system, const Eigen::MatrixXcd& initial, TimeWindow window);

struct EntanglementMap {
  PhaseSpaceGrid grid;
  std::vector<double> e_avg;
  std::optional<std::vector<bool>> chaotic;

  /// Measure-weighted mean over nodes selected by `mask` (all nodes when empty).
  double weighted_mean(const std::vector<bool>& mask = {}) const;
  double weighted_stddev() const;
};

/// Long-time-average entanglement of the projected coherent state at every node.
EntanglementMap entanglement_map(const FloquetSystem& system, const PhaseSpaceGrid& grid, TimeWindow window = {});

}  // namespace ctops
