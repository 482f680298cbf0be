#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnls/dynamics.hpp"
#include "cnls/groundstate.hpp"
#include "cnls/hypotheses.hpp"
#include "cnls/nonlinearity.hpp"

namespace cnls::cli {

/// Any problem with the configuration or command-line usage (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FamilyConfig {
  std::string family;
  std::map<std::string, double> params;
};

struct ProblemConfig {
  std::size_t dims = 1;
  std::size_t components = 1;
  FamilyConfig nonlinearity;
  bool x_dependent = false;
  std::optional<FamilyConfig> infinity;
  HypothesisParams hypothesis_params;
  std::vector<Hypothesis> requested;  ///< empty: default selection
  std::size_t hypothesis_samples = 2048;
};

struct StabilityConfig {
  std::vector<double> deltas;
  std::vector<std::uint64_t> seeds;
  double T = 50.0;
};

struct OutputConfig {
  std::filesystem::path directory = "cnls-out";
  bool csv = true;
  bool text = true;
  bool dump = true;
};

struct RunConfig {
  std::uint64_t seed = 1;
  ProblemConfig problem;
  std::vector<std::size_t> points;
  std::vector<double> lengths;
  std::vector<double> c;
  MinimizeOptions solver;
  EvolveOptions dynamics;
  std::optional<std::filesystem::path> initial;
  std::optional<StabilityConfig> stability;
  OutputConfig output;
  /// FNV-1a 64 (hex) of the canonical configuration without the output block.
  std::string hash;
  /// Sorted-key JSON of the configuration without the output block.
  std::string canonical;
};

/// Parses and validates a JSON configuration. Unknown keys, wrong types and
/// values outside their admissible ranges throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Replaces the seed (and the solver seed) and recomputes the hash.
void override_seed(RunConfig& config, std::uint64_t seed);

NonlinearityPtr build_nonlinearity(const FamilyConfig& family, std::size_t components, bool x_dependent);
/// The spec named by the configuration, without the consistency check.
NonlinearityPtr build_nonlinearity(const RunConfig& config);

/// Throws ConfigError unless grid and constraint blocks are present and valid.
GridPtr build_grid(const RunConfig& config);

}  // namespace cnls::cli
