#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pconf/optimizer.hpp"

namespace pconf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// identity | rotation (c) | fourier (coefficients n -> c_n) | sinusoidal (eps) | radial_oracle (p, alpha)
struct BoundarySpec {
  std::string preset = "identity";
  double c = 0.0;
  double eps = 0.0;
  double p = 2.0;
  double alpha = 15.0 / 8.0;
  std::map<int, cplx> coefficients;
};

// constant_disk: value * chi_D.  radial_oracle: mu of the radial map (p, alpha) on the
// annulus rho_inner < |z| < 1, zero elsewhere. truncate_m >= 2 clamps |mu| to 1 - 1/m.
struct MuSpec {
  std::string preset = "constant_disk";
  cplx value = 0.3;
  double p = 2.0;
  double alpha = 15.0 / 8.0;
  int truncate_m = 0;
};

// Map examined by `diagnose`. boundary: the harmonic initial guess of the boundary preset;
// affine: a z + b conj(z); radial_oracle: the radial map of the boundary preset; csv: a
// field file in the (r, theta, re, im) layout on the configured grid.
struct MapSpec {
  std::string preset = "boundary";
  cplx a = 1.0;
  cplx b = 0.0;
  std::string path;
};

struct ExperimentConfig {
  std::string subcommand;  // solve | sweep | radial | beltrami | diagnose | douglas
  std::string domain = "disk";
  double rho_inner = 0.5;
  int n_r = 64;
  int n_theta = 128;
  BoundarySpec boundary;
  double p = 2.0;
  std::vector<double> p_schedule;
  SolverConfig solver;
  std::uint64_t seed = 1;
  // beltrami
  MuSpec mu;
  int fft_n = 1024;
  double fft_padding = 8.0;
  double beltrami_tol = 1e-12;
  int beltrami_max_iter = 500;
  // radial
  double alpha = 15.0 / 8.0;
  double rho_min = 0.1;
  int n_samples = 257;
  // douglas
  int n_quad = 2048;
  // diagnose
  MapSpec map;
  int potential_fft_n = 512;
  double s_max = 1e4;

  void validate() const;
};

// Parses the JSON config text. Unknown keys and ill-typed values throw ConfigError.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
// Canonical JSON of every field, as echoed into summaries.
std::string config_to_json(const ExperimentConfig& config);

struct RunOutcome {
  int exit_code = 0;  // 0 complete, 2 a solve did not converge, 1 configuration error
  std::string message;
  std::string summary;  // the summary.json text
  std::vector<std::filesystem::path> files;
};

// Runs the pipeline and writes summary.json plus CSV field dumps to out_dir.
// Configuration errors are returned as exit code 1; other failures propagate.
RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace pconf
