#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "ctops/entanglement.hpp"
#include "ctops/filtering.hpp"

using namespace ctops;

namespace {

constexpr double kPi = std::numbers::pi;

struct Labelled {
  FloquetSystem system;
  std::vector<EigenstateFeatures> features;
};

const Labelled& mixed() {
  static const Labelled l = [] {
    auto sys = diagonalize(build_floquet(SubspaceSpec::symmetric(HalfInteger::from_int(150)), 1.5, kPi / 2));
    auto f = classify_eigenstates(eigenstate_features(sys, PhaseSpaceGrid::cells(100, 100)), default_filter_config(),
                                  sys.spec.spin_j);
    return Labelled{std::move(sys), std::move(f)};
  }();
  return l;
}

int count(const std::vector<EigenstateFeatures>& f, EigenLabel label) {
  return static_cast<int>(std::count_if(f.begin(), f.end(), [&](const auto& x) { return x.label == label; }));
}

EigenstateFeatures feature(int k, double s_q, double jz) {
  EigenstateFeatures f;
  f.k = k;
  f.s_q = s_q;
  f.jz = jz;
  return f;
}

}  // namespace

TEST(Features, IntegrableBasisStates) {
  auto sys = diagonalize(build_floquet(SubspaceSpec::symmetric(HalfInteger::from_int(6)), 0.0, 0.9));
  auto f = eigenstate_features(sys, PhaseSpaceGrid::cells(40, 40));
  ASSERT_EQ(f.size(), 13u);
  for (const auto& x : f) {
    EXPECT_NEAR(x.jz, std::round(x.jz), 1e-12);
    EXPECT_NEAR(x.entanglement, 0.0, 1e-12);
    EXPECT_EQ(x.label, EigenLabel::Unlabeled);
  }
}

TEST(Features, MatchDirectEvaluation) {
  const auto& l = mixed();
  for (int k : {0, 77, 300}) {
    SubspaceState s{l.system.spec, l.system.eigenvectors.col(k)};
    EXPECT_NEAR(l.features[k].jz, jz_expectation(s), 1e-10);
    EXPECT_NEAR(l.features[k].entanglement, entanglement_entropy(s), 1e-12);
    EXPECT_NEAR(l.features[k].s_q, husimi_entropy(husimi(s, PhaseSpaceGrid::cells(100, 100)), PhaseSpaceGrid::cells(100, 100)), 1e-10);
    EXPECT_EQ(l.features[k].phase, l.system.eigenphases[k]);
  }
}

TEST(Classify, MixedPhaseSpaceHasBothClasses) {
  const auto& f = mixed().features;
  const int chaotic = count(f, EigenLabel::Chaotic), regular = count(f, EigenLabel::Regular);
  EXPECT_GT(chaotic, 0);
  EXPECT_GT(regular, 0);
  EXPECT_EQ(chaotic + regular + count(f, EigenLabel::Ambiguous), 301);
  auto basis = chaotic_subspace(mixed().system, f);
  EXPECT_GT(basis.cols(), 0);
  EXPECT_LT(basis.cols(), 301);
}

TEST(Classify, ChaoticStatesAreDelocalisedAndMoreEntangled) {
  const auto& f = mixed().features;
  double s_c = 0, s_r = 0, e_c = 0, e_r = 0;
  int n_c = 0, n_r = 0;
  double min_low = 1e9;
  for (const auto& x : f) {
    if (x.label == EigenLabel::Chaotic) {
      s_c += x.s_q, e_c += x.entanglement, ++n_c;
    } else if (x.label == EigenLabel::Regular) {
      s_r += x.s_q, e_r += x.entanglement, ++n_r;
      min_low = std::min(min_low, x.s_q);
    }
  }
  EXPECT_GT(s_c / n_c, s_r / n_r);
  EXPECT_GT(e_c / n_c, e_r / n_r);
  for (const auto& x : f) {
    if (x.s_q == min_low) EXPECT_EQ(x.label, EigenLabel::Regular);
  }
}

TEST(Classify, PermutationInvariant) {
  auto f = mixed().features;
  std::mt19937_64 rng(41);
  std::shuffle(f.begin(), f.end(), rng);
  auto relabelled = classify_eigenstates(f, default_filter_config(), HalfInteger::from_int(150));
  for (const auto& x : relabelled) EXPECT_EQ(x.label, mixed().features[x.k].label);
}

TEST(Classify, SubspaceProjectorIdempotent) {
  const auto& l = mixed();
  auto basis = chaotic_subspace(l.system, l.features);
  const Eigen::MatrixXcd p = basis * basis.adjoint();
  EXPECT_LT((p * p - p).cwiseAbs().maxCoeff(), 1e-10);
  for (Eigen::Index c = 0; c < basis.cols(); ++c) EXPECT_LT((p * basis.col(c) - basis.col(c)).norm(), 1e-10);
}

TEST(Classify, GlobalChaosLabelsNearlyEverything) {
  auto sys = diagonalize(build_floquet(SubspaceSpec::symmetric(HalfInteger::from_int(150)), 6.0, kPi / 2));
  auto f = classify_eigenstates(eigenstate_features(sys, PhaseSpaceGrid::cells(100, 100)), default_filter_config(),
                                sys.spec.spin_j);
  EXPECT_GE(count(f, EigenLabel::Chaotic), 0.95 * 301);
  auto basis = chaotic_subspace(sys, f);
  if (basis.cols() == 301) {
    auto r = mc_average(EnsembleSpec::subspace(EnsembleKind::UE, basis, 5), Functional::Entropy, 4000);
    EXPECT_LT(std::abs(r.mc_mean - typical_entanglement_ue(301)), 3 * r.mc_stderr);
  }
}

TEST(Classify, GreyBand) {
  FilterConfig c;
  c.s_q_min = 1.0;
  c.jz_min = 0.0;
  c.grey_margin = 0.05;
  // s_q range 2 → band 0.1; jz range 2J → band 0.1 in units of J.
  std::vector<EigenstateFeatures> f{feature(0, 0.0, -10.0), feature(1, 2.0, 10.0), feature(2, 1.05, 5.0),
                                    feature(3, 1.2, 5.0),   feature(4, 0.85, 5.0), feature(5, 1.5, 0.5)};
  auto l = classify_eigenstates(f, c, HalfInteger::from_int(10));
  EXPECT_EQ(l[0].label, EigenLabel::Regular);
  EXPECT_EQ(l[1].label, EigenLabel::Chaotic);
  EXPECT_EQ(l[2].label, EigenLabel::Ambiguous);
  EXPECT_EQ(l[3].label, EigenLabel::Chaotic);
  EXPECT_EQ(l[4].label, EigenLabel::Regular);
  EXPECT_EQ(l[5].label, EigenLabel::Ambiguous);
  c.grey_margin = 0.0;
  l = classify_eigenstates(f, c, HalfInteger::from_int(10));
  EXPECT_EQ(l[2].label, EigenLabel::Chaotic);
  EXPECT_EQ(l[5].label, EigenLabel::Chaotic);
}

TEST(Classify, NoChaoticStatesIsAnError) {
  auto sys = diagonalize(build_floquet(SubspaceSpec::symmetric(HalfInteger::from_int(3)), 0.5, 1.0));
  std::vector<EigenstateFeatures> f(7);
  for (int k = 0; k < 7; ++k) f[k] = feature(k, 0.0, 0.0), f[k].label = EigenLabel::Regular;
  EXPECT_THROW(chaotic_subspace(sys, f), std::invalid_argument);
}

TEST(FilterConfig, JsonRoundTripAndShippedDefaults) {
  FilterConfig c = default_filter_config();
  FilterConfig back = FilterConfig::from_json(c.to_json());
  EXPECT_EQ(back.s_q_min, c.s_q_min);
  EXPECT_EQ(back.s_q_max, c.s_q_max);
  EXPECT_EQ(back.jz_min, c.jz_min);
  EXPECT_EQ(back.jz_max, c.jz_max);
  EXPECT_EQ(back.grey_margin, c.grey_margin);
  FilterConfig shipped = FilterConfig::load(CTOPS_SOURCE_DIR "/config/filter_default.json");
  EXPECT_EQ(shipped.s_q_min, c.s_q_min);
  EXPECT_EQ(shipped.s_q_max, c.s_q_max);
  EXPECT_EQ(shipped.jz_min, c.jz_min);
  EXPECT_EQ(shipped.jz_max, c.jz_max);
  EXPECT_EQ(shipped.grey_margin, c.grey_margin);
  EXPECT_THROW(FilterConfig::from_json(R"({"grey_margin": -1})"), std::invalid_argument);
  EXPECT_EQ(to_string(EigenLabel::Chaotic), "chaotic");
}
