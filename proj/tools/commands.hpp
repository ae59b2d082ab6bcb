#pragma once

#include <iosfwd>

#include "run_config.hpp"

namespace ctops::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char* kCacheEnv = "CTOPS_CACHE_DIR";

/// Runs one command into cfg.out. While running, `run.incomplete` marks the
/// directory; on error it is replaced by `run.failed`, on success by `run.json`.
/// Returns the process exit code.
int execute(const RunConfig& cfg, std::ostream& log);

}  // namespace ctops::cli
