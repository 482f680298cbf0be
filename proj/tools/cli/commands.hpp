#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace cnls::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct CommandOptions {
  std::optional<std::filesystem::path> initial;  ///< evolve: overrides dynamics.initial
  bool verbose = false;
  std::ostream* log = nullptr;                   ///< progress and error messages
};

int cmd_groundstate(const RunConfig& config, const CommandOptions& opts);
int cmd_evolve(const RunConfig& config, const CommandOptions& opts);
int cmd_stability(const RunConfig& config, const CommandOptions& opts);
int cmd_check(const RunConfig& config, const CommandOptions& opts);
int cmd_diag(const RunConfig& config, const CommandOptions& opts);

/// Dispatches by name and maps exceptions to exit codes: configuration and
/// validation problems give 2, numerical failures give 1.
int run_command(const std::string& name, const RunConfig& config, const CommandOptions& opts);

}  // namespace cnls::cli
