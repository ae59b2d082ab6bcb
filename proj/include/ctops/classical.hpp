#pragma once

// Classical kicked coupled tops: two unit spins I, J. One period is a
// rotation of J about the space-fixed z axis by β followed by a precession of
// both spins about F = I + J by the angle α|F|. Both rotations are
// right-handed, which reproduces the Heisenberg-picture action of
// exp(-i α F²/2J) exp(-i β J_z).

#include <span>
#include <vector>

#include <Eigen/Core>

#include "ctops/phase_space_grid.hpp"

namespace ctops::classical {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

struct ClassicalSpinPair {
  Vec3 i_vec = Vec3::UnitZ();
  Vec3 j_vec = -Vec3::UnitZ();

  double fz() const { return i_vec.z() + j_vec.z(); }
  Vec3 total() const { return i_vec + j_vec; }
  Vec6 stacked() const;
  static ClassicalSpinPair from_stacked(const Vec6& v);
};

struct ClassicalMapParams {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Surface-of-section coordinates on F_z = 0.
struct SectionPoint {
  double delta_fz = 0.0;   // I_z - J_z, in [-2, 2]
  double delta_phi = 0.0;  // φ_I - φ_J, in [0, 2π)
};

/// Right-handed rotation of `v` about the unit vector `axis`.
Vec3 rotate(const Vec3& v, const Vec3& axis, double angle);

ClassicalSpinPair kick_rotate(const ClassicalSpinPair& state, double beta);

/// Rotates both spins about F by alpha·|F|. Identity when |F| < 1e-12.
ClassicalSpinPair precess(const ClassicalSpinPair& state, double alpha);

ClassicalSpinPair floquet_step(const ClassicalSpinPair& state, const ClassicalMapParams& params);
ClassicalSpinPair inverse_floquet_step(const ClassicalSpinPair& state, const ClassicalMapParams& params);

/// Throws std::invalid_argument if |delta_fz| > 2.
ClassicalSpinPair section_embed(const SectionPoint& p);
/// Throws std::invalid_argument if |f_z| >= 1e-9.
SectionPoint section_project(const ClassicalSpinPair& state);

SectionPoint section_point(const GridNode& node);

using Orbit = std::vector<SectionPoint>;

/// Stroboscopic orbits of n_steps + 1 points; element 0 is the initial point.
std::vector<Orbit> poincare_section(const ClassicalMapParams& params, std::span<const SectionPoint> initial_points,
                                    int n_steps);

struct LyapunovOptions {
  double fd_step = 1e-7;
  int renormalize_every = 10;
};

/// Largest Lyapunov exponent per map step from the tangent map, propagated by
/// central finite differences of floquet_step along the deviation vector.
/// Requires n_steps >= 100.
double lyapunov_exponent(const ClassicalMapParams& params, const SectionPoint& ic, int n_steps,
                         const LyapunovOptions& options = {});

/// 4×4 Jacobian of one map step in canonical coordinates (I_z, φ_I, J_z, φ_J),
/// by central differences. Its determinant is 1 for a symplectic map.
Eigen::Matrix4d canonical_jacobian(const ClassicalSpinPair& state, const ClassicalMapParams& params,
                                   double step = 1e-6);

struct ClassificationOptions {
  double threshold = 0.05;
  int n_steps = 2000;
  LyapunovOptions lyapunov;
};

struct ClassifiedGrid {
  std::vector<SectionPoint> points;
  std::vector<double> weights;
  std::vector<double> lyapunov;
  std::vector<bool> chaotic;

  double chaotic_fraction() const;
  /// Fraction of the grid's measure that is labelled chaotic.
  double chaotic_measure_fraction() const;
};

ClassifiedGrid classify_grid(const ClassicalMapParams& params, const PhaseSpaceGrid& grid,
                             const ClassificationOptions& options = {});

/// Fraction of the n_bins × n_bins boxes of the (δF_z, δφ) section visited by an orbit.
double section_occupancy(const Orbit& orbit, int n_bins);

}  // namespace ctops::classical
