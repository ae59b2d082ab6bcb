#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include "ctops/io.hpp"

namespace ctops::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_plain_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

class Source {
 public:
  Source(const nlohmann::json& file, const std::map<std::string, std::string>& flags) : file_(file), flags_(flags) {}

  bool has(const std::string& key) const { return flags_.count(key) || file_.contains(key); }

  std::string text(const std::string& key) const {
    if (auto it = flags_.find(key); it != flags_.end()) return it->second;
    const auto& v = file_.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw ConfigError(key, "expected a string, number or boolean");
  }

  double real(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    try {
      return parse_angle(text(key));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
  }

  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const std::string t = trim(text(key));
    long long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError(key, "expected an integer, got '" + t + "'");
    return v;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string t = trim(text(key));
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError(key, "expected a boolean, got '" + t + "'");
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? trim(text(key)) : fallback;
  }

  HalfInteger spin(const std::string& key, HalfInteger fallback) const {
    if (!has(key)) return fallback;
    try {
      return HalfInteger::parse(trim(text(key)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
  }

 private:
  const nlohmann::json& file_;
  const std::map<std::string, std::string>& flags_;
};

struct CommandDefaults {
  std::string grid;
  bool vertices;
  int steps;
  std::int64_t samples;
};

CommandDefaults defaults_for(const std::string& command) {
  if (command == "poincare") return {"8x8", false, 1000, 0};
  if (command == "lyapunov-map") return {"61x61", true, 2000, 0};
  if (command == "husimi") return {"100x100", false, 0, 0};
  if (command == "features") return {"100x100", false, 0, 100};
  if (command == "ent-history") return {"61x61", true, 320, 0};
  if (command == "ent-map") return {"61x61", true, 2000, 0};
  if (command == "mc") return {"100x100", false, 0, 10000};
  return {"61x61", true, 0, 0};
}

}  // namespace

double parse_angle(const std::string& raw) {
  const std::string text = trim(raw);
  double plain = 0.0;
  if (parse_plain_double(text, plain)) return plain;
  static const std::regex pattern(
      R"(^([+-])?\s*(\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*(pi|π)?\s*(?:/\s*(\d+(?:\.\d*)?|\.\d+))?$)");
  std::smatch m;
  if (text.empty() || !std::regex_match(text, m, pattern) || (!m[2].matched && !m[3].matched)) {
    throw std::invalid_argument("cannot parse '" + text + "' as a number or rational multiple of pi");
  }
  double value = m[2].matched ? std::stod(m[2].str()) : 1.0;
  if (m[3].matched) value *= std::numbers::pi;
  if (m[4].matched) {
    const double den = std::stod(m[4].str());
    if (den == 0.0) throw std::invalid_argument("zero denominator in '" + text + "'");
    value /= den;
  }
  return (m[1].matched && m[1].str() == "-") ? -value : value;
}

GridSpec parse_grid(const std::string& text, bool vertices) {
  static const std::regex pattern(R"(^\s*(\d+)\s*[xX]\s*(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw std::invalid_argument("expected NxM, got '" + text + "'");
  GridSpec g{std::stoi(m[1].str()), std::stoi(m[2].str()), vertices};
  if (g.n_u < (vertices ? 2 : 1) || g.n_phi < 1) throw std::invalid_argument("grid too small: '" + text + "'");
  return g;
}

TimeWindow parse_window(const std::string& text) {
  static const std::regex pattern(R"(^\s*(\d+)\s*:\s*(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, pattern)) throw std::invalid_argument("expected FIRST:LAST, got '" + text + "'");
  TimeWindow w{std::stoi(m[1].str()), std::stoi(m[2].str())};
  if (w.last < w.first) throw std::invalid_argument("window end precedes start in '" + text + "'");
  return w;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "alpha", "beta", "J", "I", "mf", "grid", "grid-kind", "window", "steps", "threshold", "dtheta", "dphi",
      "eigenstate", "seed", "samples", "kind", "d", "d2", "functional", "subspace", "filter", "with-entanglement",
      "spacing", "matrix-out", "pgm", "classify", "format", "out", "threads"};
  return keys;
}

RunConfig resolve_config(const std::string& command, const nlohmann::json& file,
                         const std::map<std::string, std::string>& flags) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) throw ConfigError("command", "unknown command '" + command + "'");
  if (!file.is_null() && !file.is_object()) throw ConfigError("config", "config file must hold a JSON object");
  const auto& keys = config_keys();
  if (file.is_object()) {
    for (const auto& [key, value] : file.items()) {
      if (key == "command") continue;
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError(key, "unknown config key");
    }
  }
  Source src(file, flags);
  const CommandDefaults def = defaults_for(command);

  RunConfig c;
  c.command = command;
  if (src.has("alpha")) c.alpha = src.real("alpha", 0.0);
  c.beta = src.real("beta", std::numbers::pi / 2);
  c.spin_j = src.spin("J", c.spin_j);
  c.spin_i = src.spin("I", c.spin_j);
  c.m_f = src.spin("mf", HalfInteger::from_int(0));
  if (c.spin_j.twice() <= 0) throw ConfigError("J", "spin must be positive");
  if (c.spin_i.twice() <= 0) throw ConfigError("I", "spin must be positive");
  try {
    SubspaceSpec{c.spin_i, c.spin_j, c.m_f}.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("mf", e.what());
  }

  const std::string kind = src.string("grid-kind", def.vertices ? "vertices" : "cells");
  if (kind != "cells" && kind != "vertices") throw ConfigError("grid-kind", "expected cells or vertices");
  try {
    c.grid = parse_grid(src.string("grid", def.grid), kind == "vertices");
  } catch (const std::invalid_argument& e) {
    throw ConfigError("grid", e.what());
  }
  try {
    c.window = parse_window(src.string("window", "300:320"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("window", e.what());
  }

  const long long steps = src.integer("steps", def.steps);
  if (steps < 0 || steps > 100000000) throw ConfigError("steps", "out of range");
  c.steps = static_cast<int>(steps);
  if (command == "lyapunov-map" || command == "ent-map") {
    if (c.steps < 100) throw ConfigError("steps", "Lyapunov classification needs at least 100 steps");
  }
  c.threshold = src.real("threshold", 0.05);
  c.delta_theta = src.real("dtheta", std::numbers::pi / 2);
  c.delta_phi = src.real("dphi", std::numbers::pi / 3);
  if (std::abs(c.delta_theta) > std::numbers::pi + 1e-12) throw ConfigError("dtheta", "must lie in [-pi, pi]");
  if (src.has("eigenstate")) {
    const long long k = src.integer("eigenstate", 0);
    const int d = SubspaceSpec{c.spin_i, c.spin_j, c.m_f}.dimension();
    if (k < 0 || k >= d) throw ConfigError("eigenstate", "index outside 0.." + std::to_string(d - 1));
    c.eigenstate = static_cast<int>(k);
  }

  const long long seed = src.integer("seed", 1);
  if (seed < 0) throw ConfigError("seed", "must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.samples = src.integer("samples", def.samples);
  if (c.samples < 0) throw ConfigError("samples", "must be non-negative");
  if (command == "mc" && c.samples < 2) throw ConfigError("samples", "need at least 2 samples");
  try {
    c.kind = parse_ensemble_kind(src.string("kind", "UE"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("kind", e.what());
  }
  const long long d = src.integer("d", 301);
  if (d < 1 || d > 100000000) throw ConfigError("d", "must be in 1..1e8");
  c.d = static_cast<int>(d);
  if (src.has("d2")) {
    const long long d2 = src.integer("d2", 0);
    if (d2 < c.d || d2 > 100000000) throw ConfigError("d2", "must satisfy d <= d2 <= 1e8");
    c.d2 = static_cast<int>(d2);
  }
  try {
    c.functional = parse_functional(src.string("functional", "entropy"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("functional", e.what());
  }
  c.subspace = src.string("subspace", "full");
  if (c.subspace != "full" && c.subspace != "chaotic") throw ConfigError("subspace", "expected full or chaotic");
  if (src.has("filter")) {
    c.filter = src.string("filter", "");
    try {
      c.filter_config = FilterConfig::load(*c.filter);
    } catch (const std::exception& e) {
      throw ConfigError("filter", e.what());
    }
  }

  c.with_entanglement = src.boolean("with-entanglement", false);
  c.spacing = src.boolean("spacing", false);
  c.matrix_out = src.boolean("matrix-out", false);
  c.pgm = src.boolean("pgm", false);
  c.classify = src.boolean("classify", true);
  c.format = src.string("format", "csv");
  if (c.format != "csv" && c.format != "json") throw ConfigError("format", "expected csv or json");
  c.out = src.string("out", "out");
  const long long threads = src.integer("threads", 0);
  if (threads < 0 || threads > 4096) throw ConfigError("threads", "must be in 0..4096");
  c.threads = static_cast<int>(threads);

  const bool needs_alpha = command != "typical" && !(command == "mc" && c.subspace == "full");
  if (needs_alpha && !c.alpha) throw ConfigError("alpha", "required for " + command);
  return c;
}

double RunConfig::require_alpha() const {
  if (!alpha) throw ConfigError("alpha", "required for " + command);
  return *alpha;
}

nlohmann::json RunConfig::canonical() const {
  nlohmann::json j;
  j["command"] = command;
  const auto& cmd = command;
  const bool physics = !(cmd == "typical" || (cmd == "mc" && subspace == "full"));
  if (physics) {
    j["alpha"] = *alpha;
    j["beta"] = beta;
    j["J"] = spin_j.to_string();
    j["I"] = spin_i.to_string();
    j["mf"] = m_f.to_string();
  }
  if (cmd == "poincare" || cmd == "lyapunov-map" || cmd == "husimi" || cmd == "features" || cmd == "ent-map" ||
      (cmd == "mc" && subspace == "chaotic")) {
    j["grid"] = std::to_string(grid.n_u) + "x" + std::to_string(grid.n_phi);
    j["grid-kind"] = grid.vertices ? "vertices" : "cells";
  }
  if (cmd == "poincare" || cmd == "lyapunov-map" || cmd == "ent-history" || (cmd == "ent-map" && classify)) j["steps"] = steps;
  if (cmd == "lyapunov-map" || cmd == "ent-map") j["threshold"] = threshold;
  if (cmd == "ent-map") j["classify"] = classify;
  if (cmd == "ent-history" || cmd == "ent-map") j["window"] = std::to_string(window.first) + ":" + std::to_string(window.last);
  if (cmd == "ent-history" || (cmd == "husimi" && !eigenstate)) {
    j["dtheta"] = delta_theta;
    j["dphi"] = delta_phi;
  }
  if (cmd == "husimi" && eigenstate) j["eigenstate"] = *eigenstate;
  if (cmd == "eigensystem") {
    j["with-entanglement"] = with_entanglement;
    j["spacing"] = spacing;
    j["matrix-out"] = matrix_out;
    j["format"] = format;
  }
  if (cmd == "typical" || cmd == "mc") {
    j["kind"] = to_string(kind);
    j["functional"] = to_string(functional);
  }
  if (cmd == "typical" || (cmd == "mc" && subspace == "full")) j["d"] = d;
  if (cmd == "typical" && d2) j["d2"] = *d2;
  if (cmd == "mc" || cmd == "features") {
    j["seed"] = seed;
    j["samples"] = samples;
  }
  if (cmd == "mc") j["subspace"] = subspace;
  if (cmd == "features" || (cmd == "mc" && subspace == "chaotic")) j["filter"] = nlohmann::json::parse(filter_config.to_json());
  if (cmd == "lyapunov-map" || cmd == "husimi" || cmd == "ent-map") j["pgm"] = pgm;
  return j;
}

std::string RunConfig::hash() const { return io::hex64(io::fnv1a64(canonical().dump())); }

nlohmann::json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace ctops::cli
