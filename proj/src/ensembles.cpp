#include "ctops/ensembles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/QR>
#include <boost/math/special_functions/digamma.hpp>

#include "ctops/entanglement.hpp"

namespace ctops {
namespace {

struct RunningStats {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }
  // Chan et al. pairwise merge.
  void merge(const RunningStats& o) {
    if (o.n == 0) return;
    const std::int64_t total = n + o.n;
    const double delta = o.mean - mean;
    mean += delta * o.n / total;
    m2 += o.m2 + delta * delta * static_cast<double>(n) * o.n / total;
    n = total;
  }
};

double evaluate(Functional f, const Eigen::VectorXcd& v) {
  return f == Functional::Entropy ? entanglement_entropy(v) : linear_entropy(v);
}

}  // namespace

std::string to_string(EnsembleKind kind) { return kind == EnsembleKind::OE ? "OE" : "UE"; }

EnsembleKind parse_ensemble_kind(const std::string& text) {
  if (text == "OE" || text == "oe") return EnsembleKind::OE;
  if (text == "UE" || text == "ue") return EnsembleKind::UE;
  throw std::invalid_argument("unknown ensemble kind '" + text + "' (expected OE or UE)");
}

std::string to_string(Functional f) { return f == Functional::Entropy ? "entropy" : "linear_entropy"; }

Functional parse_functional(const std::string& text) {
  if (text == "entropy") return Functional::Entropy;
  if (text == "linear_entropy" || text == "linear") return Functional::LinearEntropy;
  throw std::invalid_argument("unknown functional '" + text + "' (expected entropy or linear_entropy)");
}

EnsembleSpec EnsembleSpec::full(EnsembleKind kind, int d, std::uint64_t seed) { return {kind, d, std::nullopt, seed}; }

EnsembleSpec EnsembleSpec::subspace(EnsembleKind kind, Eigen::MatrixXcd basis, std::uint64_t seed) {
  const int d = static_cast<int>(basis.cols());
  return {kind, d, std::move(basis), seed};
}

void EnsembleSpec::validate() const {
  if (dimension < 1) throw std::invalid_argument("EnsembleSpec: dimension must be >= 1");
  if (basis) {
    if (basis->cols() != dimension) throw std::invalid_argument("EnsembleSpec: basis has the wrong number of columns");
    const Eigen::MatrixXcd gram = basis->adjoint() * *basis;
    const double err = (gram - Eigen::MatrixXcd::Identity(dimension, dimension)).cwiseAbs().maxCoeff();
    if (err > 1e-10) throw std::invalid_argument("EnsembleSpec: basis is not orthonormal");
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

Eigen::VectorXcd sample_state(const EnsembleSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd c(spec.dimension);
  for (int i = 0; i < spec.dimension; ++i) {
    const double re = normal(rng);
    const double im = spec.kind == EnsembleKind::UE ? normal(rng) : 0.0;
    c[i] = {re, im};
  }
  c /= c.norm();
  if (!spec.basis) return c;
  Eigen::VectorXcd out = *spec.basis * c;
  return out / out.norm();
}

double harmonic(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("harmonic: x must be >= 0");
  if (x == std::floor(x) && x < 1e7) {
    double h = 0.0;
    for (long k = static_cast<long>(x); k >= 1; --k) h += 1.0 / k;
    return h;
  }
  return boost::math::digamma(x + 1.0) + std::numbers::egamma;
}

double typical_entanglement_ue(int d) {
  if (d < 1) throw std::invalid_argument("typical_entanglement_ue: d must be >= 1");
  return harmonic(d) - 1.0;
}

double typical_entanglement_oe(int d) {
  if (d < 1) throw std::invalid_argument("typical_entanglement_oe: d must be >= 1");
  return harmonic(0.5 * d) + std::log(4.0) - 2.0;
}

double typical_entanglement_full(int d1, int d2) {
  if (d1 < 1 || d2 < d1) throw std::invalid_argument("typical_entanglement_full: need d2 >= d1 >= 1");
  double sum = 0.0;
  const long top = static_cast<long>(d1) * d2;
  for (long k = top; k > d2; --k) sum += 1.0 / k;
  return sum - (d1 - 1.0) / (2.0 * d2);
}

double typical_linear_entropy(EnsembleKind kind, int d) {
  if (d < 1) throw std::invalid_argument("typical_linear_entropy: d must be >= 1");
  return kind == EnsembleKind::OE ? 1.0 - 3.0 / (d + 2.0) : 1.0 - 2.0 / (d + 1.0);
}

EnsembleReport mc_average(const EnsembleSpec& spec, Functional functional, std::int64_t n_samples) {
  spec.validate();
  if (n_samples < 2) throw std::invalid_argument("mc_average: need at least 2 samples");
  const std::int64_t n_streams = (n_samples + kSamplesPerStream - 1) / kSamplesPerStream;
  std::vector<RunningStats> partial(static_cast<std::size_t>(n_streams));

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t s = 0; s < n_streams; ++s) {
    auto rng = stream_rng(spec.seed, static_cast<std::uint64_t>(s));
    const std::int64_t begin = s * kSamplesPerStream;
    const std::int64_t end = std::min(n_samples, begin + kSamplesPerStream);
    for (std::int64_t i = begin; i < end; ++i) partial[s].add(evaluate(functional, sample_state(spec, rng)));
  }
  RunningStats total;
  for (const auto& p : partial) total.merge(p);

  EnsembleReport report;
  report.n_samples = total.n;
  report.mc_mean = total.mean;
  report.mc_stderr = std::sqrt(total.m2 / (total.n - 1)) / std::sqrt(static_cast<double>(total.n));
  if (!spec.basis) {
    if (functional == Functional::Entropy) {
      report.analytic = spec.kind == EnsembleKind::UE ? typical_entanglement_ue(spec.dimension)
                                                      : typical_entanglement_oe(spec.dimension);
    } else {
      report.analytic = typical_linear_entropy(spec.kind, spec.dimension);
    }
  }
  return report;
}

Eigen::MatrixXcd haar_matrix(EnsembleKind kind, int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd g(d, d);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) g(r, c) = {normal(rng), kind == EnsembleKind::UE ? normal(rng) : 0.0};
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < d; ++c) {
    const std::complex<double> diag = r(c, c);
    if (std::abs(diag) > 0.0) q.col(c) *= diag / std::abs(diag);
  }
  return q;
}

}  // namespace ctops
