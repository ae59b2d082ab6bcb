#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>

#include <omp.h>

#include "ctops/classical.hpp"
#include "ctops/entanglement.hpp"
#include "ctops/ensembles.hpp"
#include "ctops/filtering.hpp"
#include "ctops/floquet.hpp"
#include "ctops/io.hpp"
#include "ctops/version.hpp"

namespace ctops::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Context {
  const RunConfig& cfg;
  std::string hash;
  fs::path out;
  std::optional<fs::path> cache;
  json results = json::object();
  std::vector<std::string> files;
  std::ostream& log;

  io::CsvWriter csv(const std::string& name, const std::vector<std::string>& columns) {
    files.push_back(name);
    io::CsvWriter w(out / name, hash, columns);
    w.comment("command", cfg.command);
    return w;
  }

  void pgm(const std::string& name, const std::vector<double>& values, int width, int height) {
    files.push_back(name);
    io::write_pgm(out / name, values, width, height, hash);
  }

  void binary_sidecar(const std::string& name) {
    files.push_back(name);
    std::ofstream meta(out / (name + ".meta.json"));
    meta << json{{"config_hash", hash}, {"file", name}}.dump(2) << "\n";
    files.push_back(name + ".meta.json");
  }
};

SubspaceSpec block_of(const RunConfig& cfg) { return {cfg.spin_i, cfg.spin_j, cfg.m_f}; }

PhaseSpaceGrid grid_of(const RunConfig& cfg) {
  return cfg.grid.vertices ? PhaseSpaceGrid::vertices(cfg.grid.n_u, cfg.grid.n_phi)
                           : PhaseSpaceGrid::cells(cfg.grid.n_u, cfg.grid.n_phi);
}

void require_symmetric(const RunConfig& cfg) {
  if (cfg.spin_i != cfg.spin_j) throw ConfigError("I", cfg.command + " needs equal spins");
  if (cfg.m_f.twice() != 0) throw ConfigError("mf", cfg.command + " needs the M_F = 0 block");
}

FloquetSystem system_of(Context& ctx, bool eigen) {
  const RunConfig& cfg = ctx.cfg;
  const SubspaceSpec spec = block_of(cfg);
  const double alpha = cfg.require_alpha();
  if (eigen && ctx.cache) {
    const fs::path file = eigensystem_cache_path(*ctx.cache, spec, alpha, cfg.beta);
    if (auto cached = load_eigensystem(file, spec, alpha, cfg.beta)) {
      ctx.log << "eigensystem loaded from " << file.string() << "\n";
      return *cached;
    }
  }
  FloquetSystem sys = build_floquet(spec, alpha, cfg.beta, cached_cg_block(spec, ctx.cache));
  if (!eigen) return sys;
  sys = diagonalize(std::move(sys));
  if (ctx.cache) save_eigensystem(eigensystem_cache_path(*ctx.cache, spec, alpha, cfg.beta), sys);
  return sys;
}

// Row 0 of a heatmap is the largest u.
std::vector<double> heatmap(const PhaseSpaceGrid& grid, const std::vector<double>& values) {
  std::vector<double> img(values.size());
  for (int r = 0; r < grid.n_u(); ++r) {
    for (int c = 0; c < grid.n_phi(); ++c) img[static_cast<std::size_t>(r) * grid.n_phi() + c] = values[grid.index(grid.n_u() - 1 - r, c)];
  }
  return img;
}

classical::ClassifiedGrid classify(const RunConfig& cfg, const PhaseSpaceGrid& grid) {
  classical::ClassificationOptions opts;
  opts.threshold = cfg.threshold;
  opts.n_steps = cfg.steps;
  return classical::classify_grid({cfg.require_alpha(), cfg.beta}, grid, opts);
}

void cmd_poincare(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto grid = grid_of(cfg);
  std::vector<classical::SectionPoint> ics;
  for (const auto& node : grid.nodes()) ics.push_back(classical::section_point(node));
  const auto orbits = classical::poincare_section({cfg.require_alpha(), cfg.beta}, ics, cfg.steps);
  auto w = ctx.csv("poincare.csv", {"orbit_id", "step", "delta_fz", "delta_phi"});
  for (std::size_t o = 0; o < orbits.size(); ++o) {
    for (std::size_t n = 0; n < orbits[o].size(); ++n) {
      w.cell(static_cast<long long>(o)).cell(static_cast<long long>(n)).cell(orbits[o][n].delta_fz).cell(orbits[o][n].delta_phi);
      w.end_row();
    }
  }
  w.close();
  ctx.results["orbits"] = orbits.size();
  ctx.results["points_per_orbit"] = cfg.steps + 1;
}

void cmd_lyapunov_map(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto grid = grid_of(cfg);
  const auto cl = classify(cfg, grid);
  auto w = ctx.csv("lyapunov_map.csv", {"delta_fz", "delta_phi", "lyapunov", "chaotic"});
  for (std::size_t i = 0; i < cl.points.size(); ++i) {
    w.cell(cl.points[i].delta_fz).cell(cl.points[i].delta_phi).cell(cl.lyapunov[i]).cell(cl.chaotic[i] ? 1 : 0);
    w.end_row();
  }
  w.close();
  if (cfg.pgm) ctx.pgm("lyapunov_map.pgm", heatmap(grid, cl.lyapunov), grid.n_phi(), grid.n_u());
  ctx.results["chaotic_fraction"] = cl.chaotic_fraction();
  ctx.results["chaotic_measure_fraction"] = cl.chaotic_measure_fraction();
}

void cmd_eigensystem(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const FloquetSystem sys = system_of(ctx, true);
  const int d = sys.dimension();
  ctx.results["dimension"] = d;
  ctx.results["unitarity_residual"] = unitarity_residual(sys.matrix);
  ctx.results["eigen_residual"] = max_eigen_residual(sys);
  ctx.results["time_reversal_residual"] = time_reversal_residual(sys);

  if (cfg.format == "csv") {
    std::vector<std::string> columns{"k", "phase"};
    for (int c = 0; c < d; ++c) columns.push_back("p(m=" + sys.spec.mj(c).to_string() + ")");
    auto w = ctx.csv("eigensystem.csv", columns);
    for (int k = 0; k < d; ++k) {
      w.cell(k).cell(sys.eigenphases[k]);
      for (int c = 0; c < d; ++c) w.cell(std::norm(sys.eigenvectors(c, k)));
      w.end_row();
    }
    w.close();
  } else {
    json j;
    j["config_hash"] = ctx.hash;
    j["m_j"] = json::array();
    for (int c = 0; c < d; ++c) j["m_j"].push_back(sys.spec.mj(c).value());
    j["states"] = json::array();
    for (int k = 0; k < d; ++k) {
      json row{{"k", k}, {"phase", sys.eigenphases[k]}};
      std::vector<double> p(d);
      for (int c = 0; c < d; ++c) p[c] = std::norm(sys.eigenvectors(c, k));
      row["p"] = p;
      j["states"].push_back(row);
    }
    std::ofstream(ctx.out / "eigensystem.json") << j.dump() << "\n";
    ctx.files.push_back("eigensystem.json");
  }

  if (cfg.with_entanglement) {
    const Eigen::VectorXd e = column_entropies(sys.eigenvectors);
    auto w = ctx.csv("eigen_entanglement.csv", {"k", "phase", "E"});
    w.comment("oe_reference", io::format_double(typical_entanglement_oe(d)));
    for (int k = 0; k < d; ++k) {
      w.cell(k).cell(sys.eigenphases[k]).cell(e[k]);
      w.end_row();
    }
    w.close();
    ctx.results["mean_eigenstate_entanglement"] = e.mean();
    ctx.results["oe_reference"] = typical_entanglement_oe(d);
    ctx.results["ue_reference"] = typical_entanglement_ue(d);
    ctx.log << "mean eigenstate entanglement " << io::format_double(e.mean()) << " (OE reference "
            << io::format_double(typical_entanglement_oe(d)) << ")\n";
  }
  if (cfg.spacing) {
    const auto diag = spacing_diagnostic(sys);
    auto w = ctx.csv("spacing.csv", {"bin_lo", "bin_hi", "density", "wigner"});
    for (std::size_t b = 0; b < diag.histogram.size(); ++b) {
      const double lo = diag.bin_edges[b], hi = diag.bin_edges[b + 1];
      w.cell(lo).cell(hi).cell(diag.histogram[b]).cell((wigner_surmise_cdf(hi) - wigner_surmise_cdf(lo)) / (hi - lo));
      w.end_row();
    }
    w.close();
    ctx.results["ks_distance"] = diag.ks_distance;
  }
  if (cfg.matrix_out) {
    write_matrix_binary(ctx.out / "floquet_matrix.bin", sys.matrix);
    ctx.binary_sidecar("floquet_matrix.bin");
    write_matrix_binary(ctx.out / "eigenvectors.bin", sys.eigenvectors);
    ctx.binary_sidecar("eigenvectors.bin");
  }
}

void cmd_husimi(Context& ctx) {
  const auto& cfg = ctx.cfg;
  require_symmetric(cfg);
  const auto grid = grid_of(cfg);
  SubspaceState state;
  if (cfg.eigenstate) {
    const FloquetSystem sys = system_of(ctx, true);
    state = {sys.spec, sys.eigenvectors.col(*cfg.eigenstate)};
    ctx.results["phase"] = sys.eigenphases[*cfg.eigenstate];
  } else {
    state = projected_coherent(block_of(cfg), cfg.delta_theta, cfg.delta_phi);
  }
  const auto q = husimi(state, grid);
  auto w = ctx.csv("husimi.csv", {"delta_theta", "delta_phi", "Q"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    w.cell(grid[i].delta_theta()).cell(grid[i].delta_phi).cell(q[i]);
    w.end_row();
  }
  w.close();
  if (cfg.pgm) ctx.pgm("husimi.pgm", heatmap(grid, q), grid.n_phi(), grid.n_u());
  ctx.results["husimi_entropy"] = husimi_entropy(q, grid);
  ctx.results["jz"] = jz_expectation(state);
}

std::vector<EigenstateFeatures> labelled_features(Context& ctx, const FloquetSystem& sys) {
  return classify_eigenstates(eigenstate_features(sys, grid_of(ctx.cfg)), ctx.cfg.filter_config, sys.spec.spin_j);
}

void report_mc(Context& ctx, const EnsembleReport& r) {
  ctx.results["mc_mean"] = r.mc_mean;
  ctx.results["mc_stderr"] = r.mc_stderr;
  ctx.results["n_samples"] = r.n_samples;
  if (r.analytic) ctx.results["analytic"] = *r.analytic;
}

void cmd_features(Context& ctx) {
  const auto& cfg = ctx.cfg;
  require_symmetric(cfg);
  const FloquetSystem sys = system_of(ctx, true);
  const auto f = labelled_features(ctx, sys);
  auto w = ctx.csv("features.csv", {"k", "phase", "s_q", "jz", "E_eigenstate", "label"});
  int counts[4] = {0, 0, 0, 0};
  for (const auto& x : f) {
    w.cell(x.k).cell(x.phase).cell(x.s_q).cell(x.jz).cell(x.entanglement).cell(to_string(x.label));
    w.end_row();
    ++counts[static_cast<int>(x.label)];
  }
  w.close();
  ctx.results["regular"] = counts[static_cast<int>(EigenLabel::Regular)];
  ctx.results["chaotic"] = counts[static_cast<int>(EigenLabel::Chaotic)];
  ctx.results["ambiguous"] = counts[static_cast<int>(EigenLabel::Ambiguous)];
  if (cfg.samples >= 2 && counts[static_cast<int>(EigenLabel::Chaotic)] > 0) {
    const auto r = mc_average(EnsembleSpec::subspace(EnsembleKind::UE, chaotic_subspace(sys, f), cfg.seed),
                              Functional::Entropy, cfg.samples);
    report_mc(ctx, r);
    ctx.log << "chaotic subspace UE entanglement " << io::format_double(r.mc_mean) << " ± "
            << io::format_double(r.mc_stderr) << "\n";
  }
}

void cmd_ent_history(Context& ctx) {
  const auto& cfg = ctx.cfg;
  require_symmetric(cfg);
  const FloquetSystem sys = system_of(ctx, true);
  const auto h = entanglement_history(sys, projected_coherent(sys.spec, cfg.delta_theta, cfg.delta_phi), cfg.steps);
  auto w = ctx.csv("ent_history.csv", {"n", "E"});
  for (std::size_t n = 0; n < h.series.size(); ++n) {
    w.cell(static_cast<long long>(n)).cell(h.series[n]);
    w.end_row();
  }
  w.close();
  ctx.results["E_initial"] = h.series.front();
  if (cfg.window.last <= cfg.steps) {
    const double avg = long_time_average(h, cfg.window);
    ctx.results["E_long_time_average"] = avg;
    ctx.log << "long-time average " << io::format_double(avg) << "\n";
  }
}

void cmd_ent_map(Context& ctx) {
  const auto& cfg = ctx.cfg;
  require_symmetric(cfg);
  const FloquetSystem sys = system_of(ctx, true);
  const auto grid = grid_of(cfg);
  auto map = entanglement_map(sys, grid, cfg.window);
  if (cfg.classify) map.chaotic = classify(cfg, grid).chaotic;

  std::vector<std::string> columns{"delta_theta", "delta_phi", "E_avg"};
  if (map.chaotic) columns.push_back("chaotic");
  auto w = ctx.csv("ent_map.csv", columns);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    w.cell(grid[i].delta_theta()).cell(grid[i].delta_phi).cell(map.e_avg[i]);
    if (map.chaotic) w.cell((*map.chaotic)[i] ? 1 : 0);
    w.end_row();
  }
  w.close();
  if (cfg.pgm) ctx.pgm("ent_map.pgm", heatmap(grid, map.e_avg), grid.n_phi(), grid.n_u());

  ctx.results["mean"] = map.weighted_mean();
  ctx.results["stddev"] = map.weighted_stddev();
  if (map.chaotic) {
    const auto& chaotic = *map.chaotic;
    std::vector<bool> regular(chaotic.size());
    for (std::size_t i = 0; i < chaotic.size(); ++i) regular[i] = !chaotic[i];
    const bool any_c = std::find(chaotic.begin(), chaotic.end(), true) != chaotic.end();
    const bool any_r = std::find(regular.begin(), regular.end(), true) != regular.end();
    if (any_c) ctx.results["chaotic_mean"] = map.weighted_mean(chaotic);
    if (any_r) ctx.results["regular_mean"] = map.weighted_mean(regular);
    if (any_c && any_r) ctx.results["chaotic_regular_gap"] = map.weighted_mean(chaotic) - map.weighted_mean(regular);
  }
  ctx.log << "map mean " << io::format_double(map.weighted_mean()) << ", stddev "
          << io::format_double(map.weighted_stddev()) << "\n";
}

void cmd_typical(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double e = cfg.kind == EnsembleKind::UE ? typical_entanglement_ue(cfg.d) : typical_entanglement_oe(cfg.d);
  const double l = typical_linear_entropy(cfg.kind, cfg.d);
  std::vector<std::string> columns{"kind", "d", "entropy", "linear_entropy"};
  if (cfg.d2) columns.push_back("page_entropy");
  auto w = ctx.csv("typical.csv", columns);
  w.cell(to_string(cfg.kind)).cell(cfg.d).cell(e).cell(l);
  if (cfg.d2) w.cell(typical_entanglement_full(cfg.d, *cfg.d2));
  w.end_row();
  w.close();
  ctx.results["entropy"] = e;
  ctx.results["linear_entropy"] = l;
  if (cfg.d2) ctx.results["page_entropy"] = typical_entanglement_full(cfg.d, *cfg.d2);
  ctx.log << io::format_double(cfg.functional == Functional::Entropy ? e : l) << "\n";
}

void cmd_mc(Context& ctx) {
  const auto& cfg = ctx.cfg;
  EnsembleSpec spec = EnsembleSpec::full(cfg.kind, cfg.d, cfg.seed);
  if (cfg.subspace == "chaotic") {
    require_symmetric(cfg);
    const FloquetSystem sys = system_of(ctx, true);
    spec = EnsembleSpec::subspace(cfg.kind, chaotic_subspace(sys, labelled_features(ctx, sys)), cfg.seed);
  }
  const auto r = mc_average(spec, cfg.functional, cfg.samples);
  auto w = ctx.csv("mc.csv", {"kind", "d", "functional", "n_samples", "mc_mean", "mc_stderr", "analytic"});
  w.cell(to_string(cfg.kind)).cell(spec.dimension).cell(to_string(cfg.functional)).cell(static_cast<long long>(r.n_samples));
  w.cell(r.mc_mean).cell(r.mc_stderr).cell(r.analytic ? io::format_double(*r.analytic) : std::string());
  w.end_row();
  w.close();
  report_mc(ctx, r);
  ctx.results["dimension"] = spec.dimension;
  ctx.log << io::format_double(r.mc_mean) << " ± " << io::format_double(r.mc_stderr) << "\n";
}

void dispatch(Context& ctx) {
  const std::string& c = ctx.cfg.command;
  if (c == "poincare") return cmd_poincare(ctx);
  if (c == "lyapunov-map") return cmd_lyapunov_map(ctx);
  if (c == "eigensystem") return cmd_eigensystem(ctx);
  if (c == "husimi") return cmd_husimi(ctx);
  if (c == "features") return cmd_features(ctx);
  if (c == "ent-history") return cmd_ent_history(ctx);
  if (c == "ent-map") return cmd_ent_map(ctx);
  if (c == "typical") return cmd_typical(ctx);
  if (c == "mc") return cmd_mc(ctx);
  throw ConfigError("command", "unknown command '" + c + "'");
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file);
  out << text;
}

}  // namespace

int execute(const RunConfig& cfg, std::ostream& log) {
  const std::string hash = cfg.hash();
  const fs::path out = cfg.out;
  try {
    fs::create_directories(out);
  } catch (const fs::filesystem_error& e) {
    log << "error: field 'out': " << e.what() << "\n";
    return kExitConfig;
  }
  const fs::path incomplete = out / "run.incomplete";
  const fs::path failed = out / "run.failed";
  const fs::path summary = out / "run.json";
  fs::remove(failed);
  fs::remove(summary);
  write_text(incomplete, "config_hash " + hash + "\n");

  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  std::optional<fs::path> cache;
  if (const char* dir = std::getenv(kCacheEnv); dir && *dir) {
    cache = fs::path(dir);
    fs::create_directories(*cache);
  }

  Context ctx{cfg, hash, out, cache, json::object(), {}, log};
  int code = kExitOk;
  std::string message;
  try {
    dispatch(ctx);
  } catch (const NumericalError& e) {
    code = kExitNumerical;
    message = std::string("numerical failure: ") + e.what();
  } catch (const ConfigError& e) {
    code = kExitConfig;
    message = std::string("config error: ") + e.what();
  } catch (const std::invalid_argument& e) {
    code = kExitConfig;
    message = std::string("invalid parameters: ") + e.what();
  } catch (const std::exception& e) {
    code = kExitFailure;
    message = std::string("error: ") + e.what();
  }

  if (code != kExitOk) {
    json f{{"config_hash", hash}, {"command", cfg.command}, {"exit_code", code}, {"error", message}, {"partial_files", ctx.files}};
    write_text(failed, f.dump(2) + "\n");
    fs::remove(incomplete);
    log << message << "\n";
    return code;
  }

  json run;
  run["command"] = cfg.command;
  run["config"] = cfg.canonical();
  run["config_hash"] = hash;
  run["version"] = kVersion;
  run["output_dir"] = out.string();
  run["threads"] = cfg.threads;
  run["cache_dir"] = cache ? json(cache->string()) : json(nullptr);
  run["files"] = ctx.files;
  run["results"] = ctx.results;
  write_text(summary, run.dump(2) + "\n");
  fs::remove(incomplete);
  return kExitOk;
}

}  // namespace ctops::cli
