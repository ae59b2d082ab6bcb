#include "ctops/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ctops {
namespace {

void require_symmetric_block(const SubspaceSpec& spec) {
  spec.validate();
  if (spec.spin_i != spec.spin_j || spec.m_f != HalfInteger{}) {
    throw std::invalid_argument("projected coherent states need spin_i == spin_j and m_f == 0");
  }
}

// log C(2J, J - m)
double log_binomial(double j, double m) {
  return std::lgamma(2.0 * j + 1.0) - std::lgamma(j - m + 1.0) - std::lgamma(j + m + 1.0);
}

// Fills `out` (length 2J + 1) with the normalised projected coherent amplitudes.
void fill_projected(double j, double delta_theta, double delta_phi, std::complex<double>* out) {
  const int d = static_cast<int>(std::lround(2.0 * j)) + 1;
  const double s = std::sin(0.5 * delta_theta);
  if (s >= 1.0 || s <= -1.0) {
    std::fill(out, out + d, std::complex<double>{});
    out[s > 0.0 ? d - 1 : 0] = 1.0;
    return;
  }
  const double log_r = std::log1p(s) - std::log1p(-s);
  thread_local std::vector<double> logs;
  logs.resize(d);
  double top = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < d; ++k) {
    const double m = -j + k;
    logs[k] = m * log_r + log_binomial(j, m);
    top = std::max(top, logs[k]);
  }
  double norm2 = 0.0;
  for (int k = 0; k < d; ++k) {
    logs[k] = std::exp(logs[k] - top);
    norm2 += logs[k] * logs[k];
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (int k = 0; k < d; ++k) {
    const double m = -j + k;
    out[k] = std::polar(logs[k] * inv, m * delta_phi);
  }
}

}  // namespace

SubspaceState SubspaceState::basis(const SubspaceSpec& spec, int index) {
  spec.validate();
  SubspaceState s{spec, Eigen::VectorXcd::Zero(spec.dimension())};
  if (index < 0 || index >= spec.dimension()) throw std::out_of_range("SubspaceState::basis: index out of range");
  s.amplitudes[index] = 1.0;
  return s;
}

SubspaceState SubspaceState::uniform(const SubspaceSpec& spec) {
  spec.validate();
  const int d = spec.dimension();
  return {spec, Eigen::VectorXcd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)))};
}

Eigen::VectorXcd spin_coherent(HalfInteger spin, double theta, double phi) {
  if (!(theta >= 0.0 && theta <= std::acos(-1.0))) throw std::invalid_argument("spin_coherent: theta outside [0, pi]");
  const double j = spin.value();
  const int d = spin.twice() + 1;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d);
  const double t = std::tan(0.5 * theta);
  if (theta == 0.0) {
    out[d - 1] = 1.0;
    return out;
  }
  if (!std::isfinite(t) || t > 1e300) {
    out[0] = 1.0;
    return out;
  }
  const double log_t = std::log(t);
  std::vector<double> logs(d);
  double top = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < d; ++k) {
    const double m = -j + k;
    logs[k] = (j - m) * log_t + 0.5 * log_binomial(j, m);
    top = std::max(top, logs[k]);
  }
  double norm2 = 0.0;
  for (int k = 0; k < d; ++k) {
    logs[k] = std::exp(logs[k] - top);
    norm2 += logs[k] * logs[k];
  }
  for (int k = 0; k < d; ++k) {
    const double m = -j + k;
    out[k] = std::polar(logs[k] / std::sqrt(norm2), (j - m) * phi);
  }
  return out;
}

SubspaceState projected_coherent(const SubspaceSpec& spec, double delta_theta, double delta_phi) {
  require_symmetric_block(spec);
  SubspaceState s{spec, Eigen::VectorXcd(spec.dimension())};
  fill_projected(spec.spin_j.value(), delta_theta, delta_phi, s.amplitudes.data());
  return s;
}

Eigen::MatrixXcd projected_coherent_matrix(const SubspaceSpec& spec, const PhaseSpaceGrid& grid) {
  require_symmetric_block(spec);
  const int d = spec.dimension();
  Eigen::MatrixXcd out(d, static_cast<Eigen::Index>(grid.size()));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(grid.size()); ++n) {
    fill_projected(spec.spin_j.value(), grid[n].delta_theta(), grid[n].delta_phi, out.col(n).data());
  }
  return out;
}

std::vector<double> husimi(const SubspaceState& state, const PhaseSpaceGrid& grid) {
  const Eigen::MatrixXcd g = projected_coherent_matrix(state.spec, grid);
  const Eigen::VectorXcd overlaps = g.adjoint() * state.amplitudes;
  std::vector<double> q(grid.size());
  for (std::size_t n = 0; n < q.size(); ++n) q[n] = std::norm(overlaps[static_cast<Eigen::Index>(n)]);
  return q;
}

double husimi_entropy(const std::vector<double>& q, const PhaseSpaceGrid& grid) {
  if (q.size() != grid.size()) throw std::invalid_argument("husimi_entropy: Q and grid sizes differ");
  double z = 0.0;
  for (std::size_t n = 0; n < q.size(); ++n) {
    if (q[n] < 0.0) throw std::invalid_argument("husimi_entropy: negative Q");
    z += grid[n].weight * q[n];
  }
  if (!(z > 0.0)) throw std::invalid_argument("husimi_entropy: Q vanishes on the whole grid");
  double s = 0.0;
  for (std::size_t n = 0; n < q.size(); ++n) {
    const double p = q[n] / z;
    if (p > 0.0) s -= grid[n].weight * p * std::log(p);
  }
  return s;
}

Eigen::VectorXd husimi_entropies(const SubspaceSpec& spec, const Eigen::MatrixXcd& states, const PhaseSpaceGrid& grid) {
  require_symmetric_block(spec);
  const Eigen::Index k = states.cols();
  const std::size_t chunk = 512;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd zlogz = Eigen::VectorXd::Zero(k);
  const int d = spec.dimension();
  Eigen::MatrixXcd g(d, static_cast<Eigen::Index>(chunk));
  Eigen::MatrixXcd overlaps;
  for (std::size_t start = 0; start < grid.size(); start += chunk) {
    const std::size_t count = std::min(chunk, grid.size() - start);
    for (std::size_t n = 0; n < count; ++n) {
      const auto& node = grid[start + n];
      fill_projected(spec.spin_j.value(), node.delta_theta(), node.delta_phi, g.col(static_cast<Eigen::Index>(n)).data());
    }
    overlaps.noalias() = g.leftCols(static_cast<Eigen::Index>(count)).adjoint() * states;
    for (Eigen::Index c = 0; c < k; ++c) {
      for (std::size_t n = 0; n < count; ++n) {
        const double q = std::norm(overlaps(static_cast<Eigen::Index>(n), c));
        const double w = grid[start + n].weight;
        z[c] += w * q;
        if (q > 0.0) zlogz[c] += w * q * std::log(q);
      }
    }
  }
  Eigen::VectorXd s(k);
  for (Eigen::Index c = 0; c < k; ++c) s[c] = std::log(z[c]) - zlogz[c] / z[c];
  return s;
}

double jz_expectation(const SubspaceState& state) {
  const Eigen::VectorXd m = op_j_z(state.spec);
  return (state.amplitudes.cwiseAbs2().array() * m.array()).sum();
}

std::complex<double> flip_flop_expectation(const SubspaceState& state) {
  const auto& spec = state.spec;
  const double i = spec.spin_i.value();
  const double j = spec.spin_j.value();
  std::complex<double> acc{};
  for (int c = 1; c < spec.dimension(); ++c) {
    const double mj = spec.mj(c).value();
    const double mi = spec.mi(c).value();
    const double coef = std::sqrt((i * (i + 1.0) - mi * (mi + 1.0)) * (j * (j + 1.0) - mj * (mj - 1.0)));
    acc += std::conj(state.amplitudes[c - 1]) * coef * state.amplitudes[c];
  }
  return acc;
}

}  // namespace ctops
