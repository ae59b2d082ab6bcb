#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ctops/version.hpp"
#include "run_config.hpp"

namespace {

using ctops::cli::ConfigError;

const std::set<std::string> kBooleanKeys{"with-entanglement", "spacing", "matrix-out", "pgm", "classify"};

const std::map<std::string, std::string> kCommandHelp{
    {"poincare", "classical surface-of-section orbits"},
    {"lyapunov-map", "Lyapunov exponents and chaotic labels on a grid"},
    {"eigensystem", "Floquet eigenphases and eigenvectors"},
    {"husimi", "Husimi distribution of a coherent state or eigenstate"},
    {"features", "eigenstate features and regular/chaotic labels"},
    {"ent-history", "entanglement versus time for one coherent state"},
    {"ent-map", "long-time-average entanglement over the phase space"},
    {"typical", "analytic typical entanglement"},
    {"mc", "Monte Carlo ensemble averages"},
};

const std::map<std::string, std::string> kHelp{
    {"alpha", "coupling strength α"},
    {"beta", "kick angle β (accepts pi/2 style)"},
    {"J", "spin J"},
    {"I", "spin I (defaults to J)"},
    {"mf", "F_z block"},
    {"grid", "grid size, e.g. 61x61"},
    {"grid-kind", "cells or vertices"},
    {"window", "averaging window first:last"},
    {"steps", "map steps"},
    {"threshold", "Lyapunov threshold for the chaotic label"},
    {"dtheta", "coherent state δθ"},
    {"dphi", "coherent state δφ"},
    {"eigenstate", "eigenstate index (husimi)"},
    {"seed", "RNG seed"},
    {"samples", "Monte Carlo samples"},
    {"kind", "ensemble UE or OE"},
    {"d", "dimension"},
    {"d2", "second factor for the Page average"},
    {"functional", "entropy or linear"},
    {"subspace", "full or chaotic"},
    {"filter", "filter JSON file"},
    {"with-entanglement", "write eigenstate entanglement"},
    {"spacing", "write the spacing diagnostic"},
    {"matrix-out", "write U and the eigenvectors as binaries"},
    {"pgm", "also write a PGM heatmap"},
    {"classify", "attach classical chaotic labels"},
    {"format", "csv or json"},
    {"out", "output directory"},
    {"threads", "worker cap (0 = runtime default)"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum and classical kicked coupled tops"};
  app.set_version_flag("--version", ctops::kVersion);
  app.require_subcommand(1);

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : ctops::cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name, kCommandHelp.at(name));
    subs[name] = sub;
    sub->add_option("--config", config_paths[name], "JSON config file; flags override it");
    for (const auto& key : ctops::cli::config_keys()) {
      auto& slot = values[name][key];
      const auto help = kHelp.count(key) ? kHelp.at(key) : std::string();
      if (kBooleanKeys.count(key)) {
        sub->add_flag("--" + key + "{true}", slot, help);
      } else {
        sub->add_option("--" + key, slot, help);
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ctops::cli::kExitConfig;
  }

  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    std::map<std::string, std::string> flags;
    for (const auto& key : ctops::cli::config_keys()) {
      if (sub->count("--" + key) > 0) flags[key] = values[name][key];
    }
    try {
      nlohmann::json file = nlohmann::json::object();
      if (!config_paths[name].empty()) file = ctops::cli::read_config_file(config_paths[name]);
      const auto cfg = ctops::cli::resolve_config(name, file, flags);
      return ctops::cli::execute(cfg, std::cout);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return ctops::cli::kExitConfig;
    }
  }
  return ctops::cli::kExitConfig;
}
