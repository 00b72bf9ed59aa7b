// Experiment orchestration: JSON configs in, figure-ready CSV/JSON artifacts
// out. Every output embeds the config hash and tool version; identical
// (config, seed) pairs produce byte-identical files regardless of the thread
// count.
#ifndef SUPERRES_CLI_RUNNER_HPP
#define SUPERRES_CLI_RUNNER_HPP

#include <cstdint>
#include <string>

namespace superres {

inline constexpr const char* kToolVersion = "superres 1.0.0";

// Exit codes: 0 success, 2 config error, 3 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericFailure = 3;

struct RunOptions {
  std::string config_path;
  std::string out_dir = ".";
  bool seed_override = false;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Dispatches on the config's "experiment" field
// (filterfn | analyze | mc-rmse | optimize | classical-fi | entangle |
//  qns-comb | reproduce-figures); returns an exit code.
int run_experiment(const RunOptions& options);

// Full command-line entry: superres <subcommand> --config <path>
// [--seed u64] [--out dir] [--threads n]. The subcommand must match the
// config's experiment kind.
int run_cli(int argc, const char* const* argv);

// FNV-1a over the canonical (resolved) config dump; embedded in outputs.
std::uint64_t config_hash(const std::string& canonical_config);

}  // namespace superres

#endif
