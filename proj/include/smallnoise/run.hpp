#pragma once

#include <string>
#include <vector>

#include "smallnoise/experiments.hpp"

namespace smallnoise {

/// Pinsker consistency check for an estimated pair: the histogram TV (a lower
/// bound on the true TV) must not exceed sqrt(KL) by more than three combined
/// error bars.
bool pinsker_holds(const KlEstimate& kl, const TvEstimate& tv);

struct CliOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value, dotted paths
  std::string out_dir;                 // overrides the config's "out"
  bool check = false;
  bool dry_run = false;
  int threads = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitCheckFailed = 4;

/// Loads the config, applies overrides, dispatches the command, writes the
/// outputs, prints a one-line JSON summary to stdout. Returns the process
/// exit code; never throws.
int run_cli(const CliOptions& opts);

}  // namespace smallnoise
