#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "ctops/half_integer.hpp"

namespace ctops {

/// Fixed-F_z block of the two-spin space I ⊗ J.
///
/// Basis ordering contract used everywhere downstream: the uncoupled index
/// runs over m_J ascending; the coupled index runs over F ascending.
struct SubspaceSpec {
  HalfInteger spin_i;
  HalfInteger spin_j;
  HalfInteger m_f;

  /// Equal spins J, M_F = 0.
  static SubspaceSpec symmetric(HalfInteger spin);

  /// Throws std::invalid_argument for negative spins, |m_f| > I + J or a parity mismatch.
  void validate() const;

  HalfInteger min_mj() const;
  HalfInteger max_mj() const;
  int dimension() const;
  HalfInteger mj(int index) const { return min_mj() + HalfInteger::from_int(index); }
  HalfInteger mi(int index) const { return m_f - mj(index); }
  HalfInteger min_f() const;

  bool operator==(const SubspaceSpec&) const = default;
};

/// ⟨F, M | I, m_I; J, m_J⟩ in the Condon–Shortley convention.
///
/// Evaluated by the three-term recursion in F (Schulten–Gordon), seeded from
/// both ends and matched where the forward sweep stops growing, so no
/// factorials are formed. Returns exactly 0 when M ≠ m_I + m_J, |M| > F or the
/// triangle rule fails; throws std::invalid_argument for impossible quantum
/// numbers (negative spin, |m| > j, parity mismatch).
double clebsch_gordan(HalfInteger spin_i, HalfInteger m_i, HalfInteger spin_j, HalfInteger m_j, HalfInteger f,
                      HalfInteger m_total);

/// All ⟨F, m_I + m_J | I, m_I; J, m_J⟩ for F = max(|I - J|, |M|) … I + J.
std::vector<double> clebsch_gordan_series(HalfInteger spin_i, HalfInteger m_i, HalfInteger spin_j, HalfInteger m_j);

struct CGBlock {
  Eigen::MatrixXd matrix;               // rows: F ascending, columns: m_J ascending
  std::vector<HalfInteger> f_values;
};

CGBlock cg_block(const SubspaceSpec& spec);

/// F(F+1) in coupled-basis order.
Eigen::VectorXd op_f_squared(const SubspaceSpec& spec);
/// m_J in uncoupled-basis order.
Eigen::VectorXd op_j_z(const SubspaceSpec& spec);
/// Eigenvalues of I·J = (F² - I² - J²)/2 in coupled-basis order.
Eigen::VectorXd op_i_dot_j(const SubspaceSpec& spec);

/// Binary CG cache keyed by (2I, 2J, 2M_F). The file stores the exact doubles,
/// so a cached block is bit-identical to a recomputed one.
std::filesystem::path cg_cache_path(const std::filesystem::path& dir, const SubspaceSpec& spec);
void save_cg_block(const std::filesystem::path& file, const SubspaceSpec& spec, const CGBlock& block);
std::optional<CGBlock> load_cg_block(const std::filesystem::path& file, const SubspaceSpec& spec);
/// Loads from `dir` when present, otherwise computes and stores.
CGBlock cached_cg_block(const SubspaceSpec& spec, const std::optional<std::filesystem::path>& dir);

}  // namespace ctops
