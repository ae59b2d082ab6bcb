#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctops/entanglement.hpp"
#include "ctops/ensembles.hpp"
#include "ctops/filtering.hpp"
#include "ctops/half_integer.hpp"

namespace ctops::cli {

/// Invalid configuration; the message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::invalid_argument("field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"poincare", "lyapunov-map", "eigensystem", "husimi", "features",
                                              "ent-history", "ent-map", "typical", "mc"};
  return names;
}

/// "pi/2", "3pi/4", "-3*pi/4", "2π", "3/2", "0.25", "1e-3".
double parse_angle(const std::string& text);

struct GridSpec {
  int n_u = 0;
  int n_phi = 0;
  bool vertices = false;
};
/// "61x61"
GridSpec parse_grid(const std::string& text, bool vertices);
/// "300:320"
TimeWindow parse_window(const std::string& text);

struct RunConfig {
  std::string command;

  std::optional<double> alpha;
  double beta = 0.0;
  HalfInteger spin_j = HalfInteger::from_int(150);
  HalfInteger spin_i = HalfInteger::from_int(150);
  HalfInteger m_f = HalfInteger::from_int(0);

  GridSpec grid;
  TimeWindow window;
  int steps = 0;
  double threshold = 0.05;
  double delta_theta = 0.0;
  double delta_phi = 0.0;
  std::optional<int> eigenstate;

  std::uint64_t seed = 1;
  std::int64_t samples = 0;
  EnsembleKind kind = EnsembleKind::UE;
  int d = 301;
  std::optional<int> d2;
  Functional functional = Functional::Entropy;
  std::string subspace = "full";
  std::optional<std::filesystem::path> filter;
  FilterConfig filter_config = default_filter_config();

  bool with_entanglement = false;
  bool spacing = false;
  bool matrix_out = false;
  bool pgm = false;
  bool classify = true;
  std::string format = "csv";

  std::filesystem::path out = "out";
  int threads = 0;

  /// Every field that can change results. Output location and thread count are excluded.
  nlohmann::json canonical() const;
  /// 16 hex digits of FNV-1a over canonical().dump().
  std::string hash() const;
  double require_alpha() const;
};

/// Known keys, i.e. long flag names.
const std::vector<std::string>& config_keys();

/// Builds a RunConfig from defaults, then `file` (a JSON object), then `flags`
/// (raw strings from the command line). Throws ConfigError.
RunConfig resolve_config(const std::string& command, const nlohmann::json& file,
                         const std::map<std::string, std::string>& flags);

nlohmann::json read_config_file(const std::filesystem::path& path);

}  // namespace ctops::cli
