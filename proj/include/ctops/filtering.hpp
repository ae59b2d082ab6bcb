#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ctops/ensembles.hpp"
#include "ctops/floquet.hpp"
#include "ctops/phase_space_grid.hpp"

namespace ctops {

enum class EigenLabel { Unlabeled, Regular, Chaotic, Ambiguous };
std::string to_string(EigenLabel label);

struct EigenstateFeatures {
  int k = 0;
  double phase = 0.0;
  double s_q = 0.0;            // Husimi entropy
  double jz = 0.0;             // ⟨J_z⟩
  double entanglement = 0.0;   // eigenstate entanglement
  EigenLabel label = EigenLabel::Unlabeled;
};

/// Husimi entropy, ⟨J_z⟩ and entanglement of every eigenstate on a shared grid.
std::vector<EigenstateFeatures> eigenstate_features(const FloquetSystem& system, const PhaseSpaceGrid& grid);

/// Box rule in (s_q, jz / J): chaotic states have both features inside
/// [s_q_min, s_q_max] × [jz_min, jz_max]. A band of `grey_margin` times each
/// feature's observed range around the box edges is labelled ambiguous.
struct FilterConfig {
  double s_q_min = 0.0;
  double s_q_max = std::numeric_limits<double>::infinity();
  double jz_min = -1.0;  // in units of J
  double jz_max = 1.0;
  double grey_margin = 0.05;

  static FilterConfig load(const std::filesystem::path& file);
  void save(const std::filesystem::path& file) const;
  std::string to_json() const;
  static FilterConfig from_json(const std::string& text);
};

/// Defaults calibrated on α = 3/2, β = π/2, J = 150 with the 100 × 100 cell grid;
/// the same values ship in config/filter_default.json.
FilterConfig default_filter_config();

std::vector<EigenstateFeatures> classify_eigenstates(std::vector<EigenstateFeatures> features,
                                                     const FilterConfig& config, HalfInteger spin);

/// Chaotic-labelled eigenvectors as columns. Throws std::invalid_argument when none are chaotic.
Eigen::MatrixXcd chaotic_subspace(const FloquetSystem& system, const std::vector<EigenstateFeatures>& labels);

}  // namespace ctops
