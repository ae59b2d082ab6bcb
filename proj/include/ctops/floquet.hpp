#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ctops/angular.hpp"
#include "ctops/states.hpp"

namespace ctops {

/// Raised when an eigensolve or a post-solve residual check fails.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FloquetSystem {
  SubspaceSpec spec;
  double alpha = 0.0;  // unscaled; the phase uses alpha / spin_j
  double beta = 0.0;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd eigenphases;     // φ_k ∈ [0, 2π), ascending; U v_k = e^{-iφ_k} v_k
  Eigen::MatrixXcd eigenvectors;   // columns c^{(k)}_{m_J}

  bool has_eigensystem() const { return eigenphases.size() > 0; }
  int dimension() const { return static_cast<int>(matrix.rows()); }
};

/// U_{m'm} = Σ_F ⟨F|m'⟩ exp(-i(α F(F+1)/(2 J) + β m)) ⟨F|m⟩ on the block,
/// i.e. exp(-i (α/J) F²/2) exp(-i β J_z).
FloquetSystem build_floquet(const SubspaceSpec& spec, double alpha, double beta,
                            const std::optional<CGBlock>& cg = std::nullopt);

/// Full eigendecomposition via a complex Schur factorisation. Each eigenvector
/// is phase-fixed (largest component real positive) and the pairs are sorted
/// by phase. Throws NumericalError when the
/// residual exceeds 1e-9.
FloquetSystem diagonalize(FloquetSystem system);

double unitarity_residual(const Eigen::MatrixXcd& u);
/// max_k ‖U v_k - e^{-iφ_k} v_k‖₂
double max_eigen_residual(const FloquetSystem& system);

/// ‖e^{iβJ_z} conj(U) e^{-iβJ_z} - U†‖_max, with conj taken in the uncoupled basis.
double time_reversal_residual(const Eigen::MatrixXcd& u, const Eigen::VectorXd& jz, double beta);
double time_reversal_residual(const FloquetSystem& system);

/// U^n |ψ⟩; negative n runs the map backwards. Uses the eigensystem when
/// available, repeated multiplication otherwise.
SubspaceState evolve(const FloquetSystem& system, const SubspaceState& state, int n);
SubspaceState evolve_direct(const FloquetSystem& system, const SubspaceState& state, int n);

struct SpacingDiagnostic {
  std::vector<double> spacings;          // d - 1 neighbour gaps, unit mean
  std::vector<double> bin_edges;
  std::vector<double> histogram;         // density per bin
  double ks_distance = 0.0;              // against the Wigner surmise (π/2) s e^{-πs²/4}
};

SpacingDiagnostic spacing_diagnostic(const FloquetSystem& system, int n_bins = 40, double s_max = 4.0);
double wigner_surmise_cdf(double s);

/// Optional binary eigensystem cache keyed by spins, block and the exact bits
/// of (alpha, beta).
std::filesystem::path eigensystem_cache_path(const std::filesystem::path& dir, const SubspaceSpec& spec, double alpha,
                                             double beta);
void save_eigensystem(const std::filesystem::path& file, const FloquetSystem& system);
std::optional<FloquetSystem> load_eigensystem(const std::filesystem::path& file, const SubspaceSpec& spec,
                                              double alpha, double beta);

/// Raw matrix export: int64 rows, int64 cols, then row-major (re, im) doubles.
void write_matrix_binary(const std::filesystem::path& file, const Eigen::MatrixXcd& m);

}  // namespace ctops
