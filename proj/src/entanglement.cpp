#include "ctops/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctops {
namespace {

void require_eigensystem(const FloquetSystem& system, const char* who) {
  if (!system.has_eigensystem()) throw std::logic_error(std::string(who) + ": eigensystem required");
}

}  // namespace

Eigen::VectorXd schmidt_coefficients(const Eigen::VectorXcd& amplitudes) { return amplitudes.cwiseAbs2(); }

double shannon_entropy(const Eigen::VectorXd& p) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) e -= p[i] * std::log(p[i]);
  }
  return e;
}

double entanglement_entropy(const Eigen::VectorXcd& amplitudes) {
  return shannon_entropy(schmidt_coefficients(amplitudes));
}

double linear_entropy(const Eigen::VectorXcd& amplitudes) {
  return 1.0 - schmidt_coefficients(amplitudes).squaredNorm();
}

Eigen::VectorXd column_entropies(const Eigen::MatrixXcd& states) {
  Eigen::VectorXd out(states.cols());
  for (Eigen::Index c = 0; c < states.cols(); ++c) out[c] = entanglement_entropy(Eigen::VectorXcd(states.col(c)));
  return out;
}

EntanglementHistory entanglement_history(const FloquetSystem& system, const SubspaceState& initial, int n_max) {
  require_eigensystem(system, "entanglement_history");
  if (n_max < 0) throw std::invalid_argument("entanglement_history: n_max must be >= 0");
  EntanglementHistory h;
  h.alpha = system.alpha;
  h.beta = system.beta;
  h.spin = system.spec.spin_j;
  const Eigen::VectorXcd a = system.eigenvectors.adjoint() * initial.amplitudes;
  Eigen::VectorXcd rotated(a.size());
  h.series.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      rotated[k] = a[k] * std::polar(1.0, -static_cast<double>(n) * system.eigenphases[k]);
    }
    h.series.push_back(entanglement_entropy(Eigen::VectorXcd(system.eigenvectors * rotated)));
  }
  return h;
}

double long_time_average(const EntanglementHistory& history, TimeWindow window) {
  if (window.first < 0 || window.last < window.first ||
      window.last >= static_cast<int>(history.series.size())) {
    throw std::invalid_argument("long_time_average: window is empty or outside the history");
  }
  double sum = 0.0;
  for (int n = window.first; n <= window.last; ++n) sum += history.series[n];
  return sum / (window.last - window.first + 1);
}

Eigen::VectorXd long_time_averages(const FloquetSystem& system, const Eigen::MatrixXcd& initial, TimeWindow window) {
  require_eigensystem(system, "long_time_averages");
  if (window.first < 0 || window.last < window.first) throw std::invalid_argument("long_time_averages: empty window");
  const Eigen::Index d = system.dimension();
  const Eigen::Index total = initial.cols();
  const Eigen::Index chunk = 128;
  const int steps = window.last - window.first + 1;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(total);
  const Eigen::Index n_chunks = (total + chunk - 1) / chunk;

#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index ci = 0; ci < n_chunks; ++ci) {
    const Eigen::Index start = ci * chunk;
    const Eigen::Index count = std::min(chunk, total - start);
    const Eigen::MatrixXcd a = system.eigenvectors.adjoint() * initial.middleCols(start, count);
    Eigen::MatrixXcd rotated(d, count);
    Eigen::MatrixXcd evolved(d, count);
    Eigen::VectorXcd phase(d);
    for (int n = window.first; n <= window.last; ++n) {
      for (Eigen::Index k = 0; k < d; ++k) phase[k] = std::polar(1.0, -static_cast<double>(n) * system.eigenphases[k]);
      rotated = phase.asDiagonal() * a;
      evolved.noalias() = system.eigenvectors * rotated;
      for (Eigen::Index c = 0; c < count; ++c) out[start + c] += entanglement_entropy(Eigen::VectorXcd(evolved.col(c)));
    }
    out.segment(start, count) /= steps;
  }
  return out;
}

double EntanglementMap::weighted_mean(const std::vector<bool>& mask) const {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < e_avg.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    num += grid[i].weight * e_avg[i];
    den += grid[i].weight;
  }
  if (den <= 0.0) throw std::invalid_argument("weighted_mean: selection has zero measure");
  return num / den;
}

double EntanglementMap::weighted_stddev() const {
  const double mean = weighted_mean();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < e_avg.size(); ++i) {
    num += grid[i].weight * (e_avg[i] - mean) * (e_avg[i] - mean);
    den += grid[i].weight;
  }
  return std::sqrt(num / den);
}

EntanglementMap entanglement_map(const FloquetSystem& system, const PhaseSpaceGrid& grid, TimeWindow window) {
  const Eigen::MatrixXcd initial = projected_coherent_matrix(system.spec, grid);
  const Eigen::VectorXd avg = long_time_averages(system, initial, window);
  return {grid, std::vector<double>(avg.data(), avg.data() + avg.size()), std::nullopt};
}

}  // namespace ctops
