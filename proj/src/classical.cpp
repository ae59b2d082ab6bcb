#include "ctops/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>
#include <Eigen/LU>

namespace ctops::classical {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

// Renormalised point displaced along a tangent direction.
ClassicalSpinPair displaced(const ClassicalSpinPair& s, const Vec6& dir, double h) {
  ClassicalSpinPair out;
  out.i_vec = (s.i_vec + h * dir.head<3>()).normalized();
  out.j_vec = (s.j_vec + h * dir.tail<3>()).normalized();
  return out;
}

Vec6 project_tangent(const ClassicalSpinPair& s, const Vec6& w) {
  Vec6 out;
  out.head<3>() = w.head<3>() - s.i_vec.dot(w.head<3>()) * s.i_vec;
  out.tail<3>() = w.tail<3>() - s.j_vec.dot(w.tail<3>()) * s.j_vec;
  return out;
}

Vec6 initial_deviation(const ClassicalSpinPair& s) {
  Vec6 seed;
  seed << 0.31, -0.52, 0.79, -0.44, 0.27, 0.61;
  Vec6 w = project_tangent(s, seed);
  if (w.norm() < 1e-6) {
    seed << 0.9, 0.1, -0.2, 0.3, -0.8, 0.1;
    w = project_tangent(s, seed);
  }
  return w.normalized();
}

// Canonical coordinates (I_z, φ_I, J_z, φ_J).
Eigen::Vector4d to_canonical(const ClassicalSpinPair& s) {
  return {s.i_vec.z(), std::atan2(s.i_vec.y(), s.i_vec.x()), s.j_vec.z(), std::atan2(s.j_vec.y(), s.j_vec.x())};
}

Vec3 spin_from(double z, double phi) {
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

ClassicalSpinPair from_canonical(const Eigen::Vector4d& c) { return {spin_from(c[0], c[1]), spin_from(c[2], c[3])}; }

double angle_difference(double a, double b) { return std::remainder(a - b, kTwoPi); }

}  // namespace

Vec6 ClassicalSpinPair::stacked() const {
  Vec6 v;
  v << i_vec, j_vec;
  return v;
}

ClassicalSpinPair ClassicalSpinPair::from_stacked(const Vec6& v) { return {v.head<3>(), v.tail<3>()}; }

Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return c * v + s * axis.cross(v) + (1.0 - c) * axis.dot(v) * axis;
}

ClassicalSpinPair kick_rotate(const ClassicalSpinPair& state, double beta) {
  return {state.i_vec, rotate(state.j_vec, Vec3::UnitZ(), beta)};
}

ClassicalSpinPair precess(const ClassicalSpinPair& state, double alpha) {
  const Vec3 f = state.total();
  const double norm = f.norm();
  if (norm < 1e-12) return state;
  const Vec3 axis = f / norm;
  const double angle = alpha * norm;
  return {rotate(state.i_vec, axis, angle), rotate(state.j_vec, axis, angle)};
}

ClassicalSpinPair floquet_step(const ClassicalSpinPair& state, const ClassicalMapParams& params) {
  return precess(kick_rotate(state, params.beta), params.alpha);
}

ClassicalSpinPair inverse_floquet_step(const ClassicalSpinPair& state, const ClassicalMapParams& params) {
  return kick_rotate(precess(state, -params.alpha), -params.beta);
}

ClassicalSpinPair section_embed(const SectionPoint& p) {
  if (!(std::abs(p.delta_fz) <= 2.0)) {
    throw std::invalid_argument("section_embed: |delta_fz| must be <= 2");
  }
  const double iz = 0.5 * p.delta_fz;
  return {spin_from(iz, 0.5 * p.delta_phi), spin_from(-iz, -0.5 * p.delta_phi)};
}

SectionPoint section_project(const ClassicalSpinPair& state) {
  if (!(std::abs(state.fz()) < 1e-9)) throw std::invalid_argument("section_project: state is not on F_z = 0");
  const double phi_i = std::atan2(state.i_vec.y(), state.i_vec.x());
  const double phi_j = std::atan2(state.j_vec.y(), state.j_vec.x());
  return {state.i_vec.z() - state.j_vec.z(), wrap_angle(phi_i - phi_j)};
}

SectionPoint section_point(const GridNode& node) { return {node.delta_fz(), node.delta_phi}; }

std::vector<Orbit> poincare_section(const ClassicalMapParams& params, std::span<const SectionPoint> initial_points,
                                    int n_steps) {
  if (n_steps < 0) throw std::invalid_argument("poincare_section: n_steps must be >= 0");
  std::vector<ClassicalSpinPair> starts;
  starts.reserve(initial_points.size());
  for (const auto& p : initial_points) starts.push_back(section_embed(p));
  std::vector<Orbit> orbits(initial_points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(initial_points.size()); ++k) {
    Orbit& orbit = orbits[k];
    orbit.reserve(static_cast<std::size_t>(n_steps) + 1);
    ClassicalSpinPair s = starts[k];
    orbit.push_back(initial_points[k]);
    for (int n = 1; n <= n_steps; ++n) {
      s = floquet_step(s, params);
      orbit.push_back(section_project(s));
    }
  }
  return orbits;
}

double lyapunov_exponent(const ClassicalMapParams& params, const SectionPoint& ic, int n_steps,
                         const LyapunovOptions& options) {
  if (n_steps < 100) throw std::invalid_argument("lyapunov_exponent: n_steps must be >= 100");
  const double h = options.fd_step;
  ClassicalSpinPair x = section_embed(ic);
  Vec6 w = initial_deviation(x);
  double log_sum = 0.0;
  for (int n = 1; n <= n_steps; ++n) {
    const double scale = w.norm();
    const Vec6 dir = w / scale;
    const Vec6 plus = floquet_step(displaced(x, dir, h), params).stacked();
    const Vec6 minus = floquet_step(displaced(x, dir, -h), params).stacked();
    x = floquet_step(x, params);
    w = project_tangent(x, (plus - minus) * (scale / (2.0 * h)));
    if (n % options.renormalize_every == 0 || n == n_steps) {
      const double norm = w.norm();
      log_sum += std::log(norm);
      w /= norm;
    }
  }
  return log_sum / n_steps;
}

Eigen::Matrix4d canonical_jacobian(const ClassicalSpinPair& state, const ClassicalMapParams& params, double step) {
  const Eigen::Vector4d c0 = to_canonical(state);
  Eigen::Matrix4d jac;
  for (int k = 0; k < 4; ++k) {
    Eigen::Vector4d cp = c0, cm = c0;
    cp[k] += step;
    cm[k] -= step;
    const Eigen::Vector4d fp = to_canonical(floquet_step(from_canonical(cp), params));
    const Eigen::Vector4d fm = to_canonical(floquet_step(from_canonical(cm), params));
    for (int r = 0; r < 4; ++r) {
      const bool is_angle = (r % 2 == 1);
      const double diff = is_angle ? angle_difference(fp[r], fm[r]) : fp[r] - fm[r];
      jac(r, k) = diff / (2.0 * step);
    }
  }
  return jac;
}

double ClassifiedGrid::chaotic_fraction() const {
  if (chaotic.empty()) return 0.0;
  return static_cast<double>(std::count(chaotic.begin(), chaotic.end(), true)) / chaotic.size();
}

double ClassifiedGrid::chaotic_measure_fraction() const {
  double total = 0.0, hit = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i];
    if (chaotic[i]) hit += weights[i];
  }
  return total > 0.0 ? hit / total : 0.0;
}

ClassifiedGrid classify_grid(const ClassicalMapParams& params, const PhaseSpaceGrid& grid,
                             const ClassificationOptions& options) {
  if (options.n_steps < 100) throw std::invalid_argument("classify_grid: n_steps must be >= 100");
  if (options.lyapunov.renormalize_every < 1) throw std::invalid_argument("classify_grid: renormalize_every must be >= 1");
  ClassifiedGrid out;
  const std::size_t n = grid.size();
  out.points.resize(n);
  out.weights.resize(n);
  out.lyapunov.resize(n);
  out.chaotic.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.points[i] = section_point(grid[i]);
    out.weights[i] = grid[i].weight;
  }
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    out.lyapunov[i] = lyapunov_exponent(params, out.points[i], options.n_steps, options.lyapunov);
  }
  for (std::size_t i = 0; i < n; ++i) out.chaotic[i] = out.lyapunov[i] > options.threshold;
  return out;
}

double section_occupancy(const Orbit& orbit, int n_bins) {
  std::vector<char> seen(static_cast<std::size_t>(n_bins) * n_bins, 0);
  for (const auto& p : orbit) {
    const int a = std::clamp(static_cast<int>((p.delta_fz + 2.0) / 4.0 * n_bins), 0, n_bins - 1);
    const int b = std::clamp(static_cast<int>(p.delta_phi / kTwoPi * n_bins), 0, n_bins - 1);
    seen[static_cast<std::size_t>(a) * n_bins + b] = 1;
  }
  return static_cast<double>(std::count(seen.begin(), seen.end(), 1)) / seen.size();
}

}  // namespace ctops::classical
