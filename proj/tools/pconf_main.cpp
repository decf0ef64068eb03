#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "pconf/experiment.hpp"

#ifdef PCONF_HAVE_OPENMP
#include <omp.h>
#endif

int main(int argc, char** argv) {
  CLI::App app{"pconf: batch runner for p-harmonic mapping experiments"};
  std::filesystem::path config_path;
  std::filesystem::path out_dir = "pconf_out";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  app.add_option("--config", config_path, "JSON experiment config")->required();
  app.add_option("--out", out_dir, "output directory for summary.json and CSV dumps");
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--threads", threads, "worker threads (0 keeps the OpenMP default)")->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

#ifdef PCONF_HAVE_OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  if (threads > 1) std::cerr << "pconf: built without OpenMP, --threads ignored\n";
#endif

  pconf::ExperimentConfig config;
  try {
    config = pconf::load_experiment_config(config_path);
  } catch (const pconf::ConfigError& e) {
    std::cerr << "pconf: config error: " << e.what() << '\n';
    return 1;
  }
  if (seed) {
    config.seed = *seed;
    config.solver.seed = *seed;
  }

  pconf::RunOutcome outcome;
  try {
    outcome = pconf::run_experiment(config, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "pconf: " << config.subcommand << " failed: " << e.what() << '\n';
    return 1;
  }
  if (outcome.exit_code == 1) {
    std::cerr << "pconf: config error: " << outcome.message << '\n';
    return 1;
  }
  std::cout << config.subcommand << ": " << outcome.message << '\n';
  for (const auto& f : outcome.files) std::cout << "  wrote " << f.string() << '\n';
  return outcome.exit_code;
}
