#include "ctops/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ctops/entanglement.hpp"
#include "ctops/states.hpp"

namespace ctops {
namespace {

// Signed margin of x inside [lo, hi]; infinite or saturated edges are ignored.
double inside_by(double x, double lo, double hi, double lo_limit, double hi_limit) {
  double margin = std::numeric_limits<double>::infinity();
  if (std::isfinite(lo) && lo > lo_limit) margin = std::min(margin, x - lo);
  if (std::isfinite(hi) && hi < hi_limit) margin = std::min(margin, hi - x);
  return margin;
}

double json_number(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (j[key].is_string() && (j[key] == "inf" || j[key] == "+inf")) return std::numeric_limits<double>::infinity();
  if (j[key].is_string() && j[key] == "-inf") return -std::numeric_limits<double>::infinity();
  return j[key].get<double>();
}

nlohmann::json json_value(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace

std::string to_string(EigenLabel label) {
  switch (label) {
    case EigenLabel::Regular: return "regular";
    case EigenLabel::Chaotic: return "chaotic";
    case EigenLabel::Ambiguous: return "ambiguous";
    case EigenLabel::Unlabeled: break;
  }
  return "unlabeled";
}

std::vector<EigenstateFeatures> eigenstate_features(const FloquetSystem& system, const PhaseSpaceGrid& grid) {
  if (!system.has_eigensystem()) throw std::logic_error("eigenstate_features: eigensystem required");
  const Eigen::VectorXd s_q = husimi_entropies(system.spec, system.eigenvectors, grid);
  const Eigen::VectorXd e = column_entropies(system.eigenvectors);
  const Eigen::VectorXd m = op_j_z(system.spec);
  std::vector<EigenstateFeatures> out(system.dimension());
  for (int k = 0; k < system.dimension(); ++k) {
    out[k].k = k;
    out[k].phase = system.eigenphases[k];
    out[k].s_q = s_q[k];
    out[k].jz = (system.eigenvectors.col(k).cwiseAbs2().array() * m.array()).sum();
    out[k].entanglement = e[k];
  }
  return out;
}

FilterConfig default_filter_config() {
  FilterConfig c;
  c.s_q_min = 0.5;
  c.jz_min = -0.3;
  c.grey_margin = 0.05;
  return c;
}

std::string FilterConfig::to_json() const {
  nlohmann::json j;
  j["s_q_min"] = json_value(s_q_min);
  j["s_q_max"] = json_value(s_q_max);
  j["jz_min"] = json_value(jz_min);
  j["jz_max"] = json_value(jz_max);
  j["grey_margin"] = grey_margin;
  return j.dump(2);
}

FilterConfig FilterConfig::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  FilterConfig c;
  c.s_q_min = json_number(j, "s_q_min", c.s_q_min);
  c.s_q_max = json_number(j, "s_q_max", c.s_q_max);
  c.jz_min = json_number(j, "jz_min", c.jz_min);
  c.jz_max = json_number(j, "jz_max", c.jz_max);
  c.grey_margin = json_number(j, "grey_margin", c.grey_margin);
  if (c.grey_margin < 0.0) throw std::invalid_argument("FilterConfig: grey_margin must be >= 0");
  return c;
}

FilterConfig FilterConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::invalid_argument("cannot read filter config " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

void FilterConfig::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << to_json() << "\n";
}

std::vector<EigenstateFeatures> classify_eigenstates(std::vector<EigenstateFeatures> features,
                                                     const FilterConfig& config, HalfInteger spin) {
  if (features.empty()) return features;
  const double j = spin.value() > 0.0 ? spin.value() : 1.0;
  auto [s_lo, s_hi] = std::minmax_element(features.begin(), features.end(),
                                          [](const auto& a, const auto& b) { return a.s_q < b.s_q; });
  auto [j_lo, j_hi] = std::minmax_element(features.begin(), features.end(),
                                          [](const auto& a, const auto& b) { return a.jz < b.jz; });
  const double s_band = config.grey_margin * (s_hi->s_q - s_lo->s_q);
  const double j_band = config.grey_margin * (j_hi->jz - j_lo->jz) / j;
  const double inf = std::numeric_limits<double>::infinity();

  for (auto& f : features) {
    const double in_s = inside_by(f.s_q, config.s_q_min, config.s_q_max, -inf, inf);
    const double in_j = inside_by(f.jz / j, config.jz_min, config.jz_max, -1.0, 1.0);
    // Normalised so both features share one grey band of width 1.
    const double ds = s_band > 0.0 ? in_s / s_band : (in_s >= 0.0 ? inf : -inf);
    const double dj = j_band > 0.0 ? in_j / j_band : (in_j >= 0.0 ? inf : -inf);
    const double depth = std::min(ds, dj);
    if (depth >= 1.0) {
      f.label = EigenLabel::Chaotic;
    } else if (depth <= -1.0) {
      f.label = EigenLabel::Regular;
    } else {
      f.label = EigenLabel::Ambiguous;
    }
  }
  return features;
}

Eigen::MatrixXcd chaotic_subspace(const FloquetSystem& system, const std::vector<EigenstateFeatures>& labels) {
  if (!system.has_eigensystem()) throw std::logic_error("chaotic_subspace: eigensystem required");
  std::vector<int> keep;
  for (const auto& f : labels) {
    if (f.label == EigenLabel::Chaotic) keep.push_back(f.k);
  }
  if (keep.empty()) throw std::invalid_argument("chaotic_subspace: no eigenstate is labelled chaotic");
  Eigen::MatrixXcd basis(system.dimension(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) basis.col(static_cast<Eigen::Index>(c)) = system.eigenvectors.col(keep[c]);
  return basis;
}

}  // namespace ctops
