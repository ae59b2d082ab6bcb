#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include <Eigen/Core>

namespace ctops {

enum class EnsembleKind { OE, UE };

std::string to_string(EnsembleKind kind);
EnsembleKind parse_ensemble_kind(const std::string& text);

/// Random-state ensemble over a d-dimensional space. With `basis` set
/// (orthonormal columns, block_dim × d), samples are drawn in that subspace and
/// returned in the block's uncoupled basis.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::UE;
  int dimension = 0;
  std::optional<Eigen::MatrixXcd> basis;
  std::uint64_t seed = 0;

  static EnsembleSpec full(EnsembleKind kind, int d, std::uint64_t seed);
  static EnsembleSpec subspace(EnsembleKind kind, Eigen::MatrixXcd basis, std::uint64_t seed);
  void validate() const;
};

// Seed contract: sample block b (samples b·kSamplesPerStream …) draws from
// std::mt19937_64 seeded with splitmix64(seed ⊕ splitmix64(b)). Results are
// therefore independent of thread count and scheduling.
inline constexpr std::int64_t kSamplesPerStream = 256;
std::uint64_t splitmix64(std::uint64_t x);
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream);

/// Haar-random unit vector: i.i.d. complex (UE) or real (OE) standard normals, normalised.
Eigen::VectorXcd sample_state(const EnsembleSpec& spec, std::mt19937_64& rng);

/// H_x: direct sum for integer x, ψ(x + 1) + γ otherwise. Throws for x < 0.
double harmonic(double x);

/// H_d - 1
double typical_entanglement_ue(int d);
/// H_{d/2} + ln 4 - 2 (generalised harmonic for odd d)
double typical_entanglement_oe(int d);
/// Page average Σ_{k=d2+1}^{d1 d2} 1/k - (d1 - 1)/(2 d2); requires d2 >= d1 >= 1.
double typical_entanglement_full(int d1, int d2);
/// 1 - 3/(d+2) (OE), 1 - 2/(d+1) (UE)
double typical_linear_entropy(EnsembleKind kind, int d);

enum class Functional { Entropy, LinearEntropy };
std::string to_string(Functional f);
Functional parse_functional(const std::string& text);

struct EnsembleReport {
  std::optional<double> analytic;
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  std::int64_t n_samples = 0;
};

/// Sample mean and standard error (sample std / √n) of the functional.
/// `analytic` is filled for full-space ensembles.
EnsembleReport mc_average(const EnsembleSpec& spec, Functional functional, std::int64_t n_samples);

/// Haar-random d×d unitary (UE) or real orthogonal (OE) matrix via QR of a Gaussian matrix.
Eigen::MatrixXcd haar_matrix(EnsembleKind kind, int d, std::mt19937_64& rng);

}  // namespace ctops
