#include "ctops/floquet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace ctops {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPhaseTie = 1e-12;

double wrap_phase(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

Eigen::Index first_significant(const Eigen::VectorXcd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-8) return i;
  }
  return v.size();
}

// Rotates the global phase so the largest component (first one on ties) is real positive.
void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= peak - 1e-12) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      v[i] = std::abs(v[i]);
      return;
    }
  }
}

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}
template <typename T>
bool read_pod(std::istream& in, T& value) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return static_cast<bool>(in);
}

constexpr std::array<char, 8> kEigenMagic{'C', 'T', 'O', 'P', 'S', 'E', 'V', '1'};

}  // namespace

FloquetSystem build_floquet(const SubspaceSpec& spec, double alpha, double beta, const std::optional<CGBlock>& cg) {
  spec.validate();
  const CGBlock block = cg ? *cg : cg_block(spec);
  const int d = spec.dimension();
  if (block.matrix.rows() != d) throw std::invalid_argument("build_floquet: CG block does not match spec");
  const double j = spec.spin_j.value();
  const double scaled_alpha = (j > 0.0) ? alpha / j : 0.0;
  const Eigen::VectorXd f2 = op_f_squared(spec);
  const Eigen::VectorXd jz = op_j_z(spec);

  // U = Cᵀ diag(e^{-i ᾱ F(F+1)/2}) C diag(e^{-iβ m})
  Eigen::MatrixXcd coupled(d, d);
  for (int r = 0; r < d; ++r) {
    const std::complex<double> phase = std::polar(1.0, -0.5 * scaled_alpha * f2[r]);
    coupled.row(r) = phase * block.matrix.row(r).cast<std::complex<double>>();
  }
  FloquetSystem system;
  system.spec = spec;
  system.alpha = alpha;
  system.beta = beta;
  system.matrix.noalias() = block.matrix.transpose().cast<std::complex<double>>() * coupled;
  for (int c = 0; c < d; ++c) system.matrix.col(c) *= std::polar(1.0, -beta * jz[c]);
  return system;
}

FloquetSystem diagonalize(FloquetSystem system) {
  const int d = system.dimension();
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(system.matrix);
  if (schur.info() != Eigen::Success) {
    throw NumericalError("diagonalize: complex Schur iteration did not converge");
  }
  const Eigen::MatrixXcd& t = schur.matrixT();
  const Eigen::MatrixXcd& q = schur.matrixU();

  std::vector<double> phases(d);
  for (int k = 0; k < d; ++k) phases[k] = wrap_phase(-std::arg(t(k, k)));
  std::vector<Eigen::Index> first(d);
  for (int k = 0; k < d; ++k) first[k] = first_significant(q.col(k));

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(phases[a] - phases[b]) > kPhaseTie) return phases[a] < phases[b];
    return first[a] < first[b];
  });

  system.eigenphases.resize(d);
  system.eigenvectors.resize(d, d);
  for (int k = 0; k < d; ++k) {
    system.eigenphases[k] = phases[order[k]];
    system.eigenvectors.col(k) = q.col(order[k]);
    fix_phase(system.eigenvectors.col(k));
  }

  const double residual = max_eigen_residual(system);
  if (!(residual < 1e-9)) {
    std::ostringstream msg;
    msg << "diagonalize: eigen-residual " << residual << " exceeds 1e-9";
    throw NumericalError(msg.str());
  }
  return system;
}

double unitarity_residual(const Eigen::MatrixXcd& u) {
  const Eigen::MatrixXcd g = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return g.cwiseAbs().maxCoeff();
}

double max_eigen_residual(const FloquetSystem& system) {
  if (!system.has_eigensystem()) throw std::logic_error("max_eigen_residual: no eigensystem");
  const Eigen::MatrixXcd uv = system.matrix * system.eigenvectors;
  double worst = 0.0;
  for (int k = 0; k < system.dimension(); ++k) {
    const std::complex<double> lambda = std::polar(1.0, -system.eigenphases[k]);
    worst = std::max(worst, (uv.col(k) - lambda * system.eigenvectors.col(k)).norm());
  }
  return worst;
}

double time_reversal_residual(const Eigen::MatrixXcd& u, const Eigen::VectorXd& jz, double beta) {
  const Eigen::Index d = u.rows();
  double worst = 0.0;
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      const std::complex<double> lhs = std::polar(1.0, beta * (jz[r] - jz[c])) * std::conj(u(r, c));
      worst = std::max(worst, std::abs(lhs - std::conj(u(c, r))));
    }
  }
  return worst;
}

double time_reversal_residual(const FloquetSystem& system) {
  return time_reversal_residual(system.matrix, op_j_z(system.spec), system.beta);
}

SubspaceState evolve_direct(const FloquetSystem& system, const SubspaceState& state, int n) {
  if (state.amplitudes.size() != system.dimension()) throw std::invalid_argument("evolve: state/system mismatch");
  SubspaceState out = state;
  if (n >= 0) {
    for (int s = 0; s < n; ++s) out.amplitudes = system.matrix * out.amplitudes;
  } else {
    for (int s = 0; s < -n; ++s) out.amplitudes = system.matrix.adjoint() * out.amplitudes;
  }
  return out;
}

SubspaceState evolve(const FloquetSystem& system, const SubspaceState& state, int n) {
  if (!system.has_eigensystem() || n == 0) return evolve_direct(system, state, n);
  if (state.amplitudes.size() != system.dimension()) throw std::invalid_argument("evolve: state/system mismatch");
  Eigen::VectorXcd a = system.eigenvectors.adjoint() * state.amplitudes;
  for (int k = 0; k < system.dimension(); ++k) a[k] *= std::polar(1.0, -static_cast<double>(n) * system.eigenphases[k]);
  return {state.spec, system.eigenvectors * a};
}

double wigner_surmise_cdf(double s) {
  return s <= 0.0 ? 0.0 : 1.0 - std::exp(-0.25 * std::numbers::pi * s * s);
}

SpacingDiagnostic spacing_diagnostic(const FloquetSystem& system, int n_bins, double s_max) {
  if (!system.has_eigensystem()) throw std::logic_error("spacing_diagnostic: no eigensystem");
  SpacingDiagnostic out;
  const int d = system.dimension();
  for (int b = 0; b <= n_bins; ++b) out.bin_edges.push_back(s_max * b / n_bins);
  out.histogram.assign(n_bins, 0.0);
  if (d < 2) return out;

  std::vector<double> phases(system.eigenphases.data(), system.eigenphases.data() + d);
  std::sort(phases.begin(), phases.end());
  for (int k = 0; k + 1 < d; ++k) out.spacings.push_back(phases[k + 1] - phases[k]);
  const double mean = std::accumulate(out.spacings.begin(), out.spacings.end(), 0.0) / out.spacings.size();
  for (double& s : out.spacings) s = mean > 0.0 ? s / mean : 0.0;

  const double width = s_max / n_bins;
  for (double s : out.spacings) {
    const int b = static_cast<int>(s / width);
    if (b >= 0 && b < n_bins) out.histogram[b] += 1.0;
  }
  for (double& h : out.histogram) h /= out.spacings.size() * width;

  std::vector<double> sorted = out.spacings;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = wigner_surmise_cdf(sorted[i]);
    out.ks_distance = std::max({out.ks_distance, std::abs((i + 1) / n - cdf), std::abs(i / n - cdf)});
  }
  return out;
}

std::filesystem::path eigensystem_cache_path(const std::filesystem::path& dir, const SubspaceSpec& spec, double alpha,
                                             double beta) {
  std::uint64_t a_bits, b_bits;
  std::memcpy(&a_bits, &alpha, sizeof a_bits);
  std::memcpy(&b_bits, &beta, sizeof b_bits);
  std::ostringstream name;
  name << "eig_" << spec.spin_i.twice() << "_" << spec.spin_j.twice() << "_" << spec.m_f.twice() << "_" << std::hex
       << a_bits << "_" << b_bits << ".bin";
  return dir / name.str();
}

void save_eigensystem(const std::filesystem::path& file, const FloquetSystem& system) {
  if (!system.has_eigensystem()) throw std::logic_error("save_eigensystem: no eigensystem");
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write eigensystem cache " + file.string());
  out.write(kEigenMagic.data(), kEigenMagic.size());
  write_pod<std::int32_t>(out, system.spec.spin_i.twice());
  write_pod<std::int32_t>(out, system.spec.spin_j.twice());
  write_pod<std::int32_t>(out, system.spec.m_f.twice());
  write_pod<std::int32_t>(out, system.dimension());
  write_pod(out, system.alpha);
  write_pod(out, system.beta);
  const auto bytes = [](Eigen::Index n) { return static_cast<std::streamsize>(n); };
  out.write(reinterpret_cast<const char*>(system.matrix.data()), bytes(sizeof(std::complex<double>) * system.matrix.size()));
  out.write(reinterpret_cast<const char*>(system.eigenphases.data()), bytes(sizeof(double) * system.eigenphases.size()));
  out.write(reinterpret_cast<const char*>(system.eigenvectors.data()),
            bytes(sizeof(std::complex<double>) * system.eigenvectors.size()));
}

std::optional<FloquetSystem> load_eigensystem(const std::filesystem::path& file, const SubspaceSpec& spec,
                                              double alpha, double beta) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  std::int32_t ti, tj, tm, d;
  double a, b;
  if (!in || magic != kEigenMagic || !read_pod(in, ti) || !read_pod(in, tj) || !read_pod(in, tm) || !read_pod(in, d) ||
      !read_pod(in, a) || !read_pod(in, b)) {
    return std::nullopt;
  }
  if (ti != spec.spin_i.twice() || tj != spec.spin_j.twice() || tm != spec.m_f.twice() || d != spec.dimension() ||
      std::memcmp(&a, &alpha, sizeof a) != 0 || std::memcmp(&b, &beta, sizeof b) != 0) {
    return std::nullopt;
  }
  FloquetSystem s;
  s.spec = spec;
  s.alpha = alpha;
  s.beta = beta;
  s.matrix.resize(d, d);
  s.eigenphases.resize(d);
  s.eigenvectors.resize(d, d);
  in.read(reinterpret_cast<char*>(s.matrix.data()), static_cast<std::streamsize>(sizeof(std::complex<double>) * d * d));
  in.read(reinterpret_cast<char*>(s.eigenphases.data()), static_cast<std::streamsize>(sizeof(double) * d));
  in.read(reinterpret_cast<char*>(s.eigenvectors.data()),
          static_cast<std::streamsize>(sizeof(std::complex<double>) * d * d));
  if (!in) return std::nullopt;
  return s;
}

void write_matrix_binary(const std::filesystem::path& file, const Eigen::MatrixXcd& m) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  write_pod<std::int64_t>(out, m.rows());
  write_pod<std::int64_t>(out, m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      write_pod(out, m(r, c).real());
      write_pod(out, m(r, c).imag());
    }
  }
}

}  // namespace ctops
