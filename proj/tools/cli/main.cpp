#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"cnls: ground states, evolution and stability of coupled nonlinear Schroedinger systems"};
  app.set_version_flag("--version", std::string(CNLS_VERSION));
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string output_dir;
  std::string initial;
  std::uint64_t seed = 0;
  bool verbose = false;

  const char* names[] = {"groundstate", "evolve", "stability", "check", "diag"};
  const char* descriptions[] = {
      "Compute a constrained ground state",
      "Evolve an initial field dump in time",
      "Run the perturbation delta sweep around a ground state",
      "Check nonlinearity consistency and hypotheses",
      "Run the diagnostic identity checks",
  };
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
    sub->add_option("-c,--config", config_path, "JSON configuration file")->required();
    sub->add_option("-o,--output", output_dir, "Output directory (overrides output.directory)");
    sub->add_option("-s,--seed", seed, "Seed (overrides the config seed)");
    sub->add_flag("-v,--verbose", verbose, "Print progress to stderr");
    if (std::string(names[i]) == "evolve") sub->add_option("-i,--initial", initial, "Initial field dump");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cnls::cli::kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  cnls::cli::CommandOptions opts;
  opts.verbose = verbose;
  opts.log = &std::cerr;
  if (!initial.empty()) opts.initial = initial;

  cnls::cli::RunConfig config;
  try {
    config = cnls::cli::load_config(config_path);
    if (sub->count("--seed") > 0) cnls::cli::override_seed(config, seed);
    if (!output_dir.empty()) config.output.directory = output_dir;
  } catch (const cnls::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cnls::cli::kExitUsage;
  }
  return cnls::cli::run_command(sub->get_name(), config, opts);
}
