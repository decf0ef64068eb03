#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "pconf/experiment.hpp"

using namespace pconf;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pconf_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig load(const std::string& name) {
  return load_experiment_config(std::filesystem::path(PCONF_TEST_DATA_DIR) / name);
}

}  // namespace

TEST(ConfigParsing, RejectsUnknownKeysAtEveryLevel) {
  EXPECT_THROW(parse_experiment_config(R"({"subcommand":"solve","grid":1})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"subcommand":"solve","solver":{"maxiter":3}})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"subcommand":"solve","boundary":{"preset":"rotation","angle":1}})"),
               ConfigError);
  EXPECT_THROW(load("unknown_key.json"), ConfigError);
}

TEST(ConfigParsing, RejectsBadValues) {
  EXPECT_THROW(parse_experiment_config(R"({"subcommand":"fly"})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"subcommand":"solve","n_theta":33})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"subcommand":"solve","p":"two"})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"j({"subcommand":"solve","boundary":"radial_oracle(2, 1.875)"})j"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"subcommand":"sweep","p_schedule":[2, 3, 2.5]})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"subcommand":"solve","boundary":"fourier"})"), ConfigError);
  EXPECT_THROW(parse_experiment_config("{not json"), ConfigError);
}

TEST(ConfigParsing, PresetShorthandAndObjectFormAgree) {
  const auto a = parse_experiment_config(R"j({"subcommand":"solve","boundary":"sinusoidal(0.2)"})j");
  const auto b = parse_experiment_config(R"({"subcommand":"solve","boundary":{"preset":"sinusoidal","eps":0.2}})");
  EXPECT_EQ(config_to_json(a), config_to_json(b));
  const auto r = parse_experiment_config(
      R"j({"subcommand":"solve","domain":"annulus","boundary":"radial_oracle(2, 1.875)"})j");
  EXPECT_EQ(r.boundary.p, 2.0);
  EXPECT_EQ(r.boundary.alpha, 1.875);
}

TEST(ConfigParsing, SolverKeysAndSeedOverride) {
  const auto c = parse_experiment_config(
      R"({"subcommand":"solve","seed":9,"solver":{"max_iters":50,"grad_tol":1e-6,"memory":4,"seed":2}})");
  EXPECT_EQ(c.solver.max_iters, 50);
  EXPECT_EQ(c.solver.grad_tol, 1e-6);
  EXPECT_EQ(c.solver.memory, 4);
  EXPECT_EQ(c.solver.seed, 9u);
  EXPECT_EQ(c.seed, 9u);
}

TEST(ConfigParsing, EchoRoundTrips) {
  const auto c = load("sweep_descending.json");
  const auto again = parse_experiment_config(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
  EXPECT_EQ(again.boundary.coefficients.at(-1), c.boundary.coefficients.at(-1));
  EXPECT_EQ(again.boundary.coefficients.size(), 13u);
}

TEST(RunExperiment, IdentitySolveHasAreaEnergy) {
  const auto dir = scratch("identity");
  const auto out = run_experiment(load("solve_identity.json"), dir);
  ASSERT_EQ(out.exit_code, 0) << out.message;
  const auto j = json::parse(read_file(dir / "summary.json"));
  EXPECT_EQ(j["schema_version"], "pconf.summary/1");
  EXPECT_EQ(j["config"]["subcommand"], "solve");
  EXPECT_NEAR(j["energy_p"].get<double>(), std::numbers::pi, 1e-6 * std::numbers::pi);
  EXPECT_TRUE(j.contains("holo_residual"));
  for (const char* f : {"mapping.csv", "distortion.csv", "hopf.csv"}) EXPECT_TRUE(std::filesystem::exists(dir / f));
}

TEST(RunExperiment, RerunsAreBitIdentical) {
  const auto c = load("sweep_descending.json");
  const auto da = scratch("rerun_a"), db = scratch("rerun_b");
  const auto a = run_experiment(c, da);
  const auto b = run_experiment(c, db);
  ASSERT_EQ(a.exit_code, 0) << a.message;
  EXPECT_EQ(a.summary, b.summary);
  EXPECT_EQ(read_file(da / "sweep.csv"), read_file(db / "sweep.csv"));
}

TEST(RunExperiment, DescendingSweepHasMonotoneEnergyColumn) {
  const auto dir = scratch("sweep");
  ASSERT_EQ(run_experiment(load("sweep_descending.json"), dir).exit_code, 0);
  std::ifstream in(dir / "sweep.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "p,energy,root,k_est,flatness,distance");
  double last = 1e300;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const double e = std::stod(line.substr(c1 + 1, line.find(',', c1 + 1) - c1 - 1));
    EXPECT_LE(e, last);
    last = e;
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}

TEST(RunExperiment, NonConvergedSolveExitsTwo) {
  const auto out = run_experiment(load("solve_not_converged.json"), scratch("nc"));
  EXPECT_EQ(out.exit_code, 2);
  EXPECT_FALSE(json::parse(out.summary)["result"]["converged"].get<bool>());
}

TEST(RunExperiment, ConfigErrorsExitOne) {
  ExperimentConfig c;
  c.subcommand = "solve";
  c.n_theta = 31;
  const auto out = run_experiment(c, scratch("bad"));
  EXPECT_EQ(out.exit_code, 1);
  EXPECT_FALSE(out.message.empty());
}

TEST(RunExperiment, RadialProfileResidualColumn) {
  const auto dir = scratch("radial");
  ASSERT_EQ(run_experiment(load("radial.json"), dir).exit_code, 0);
  std::ifstream in(dir / "profile.csv");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_LT(std::abs(std::stod(line.substr(line.rfind(',') + 1))), 1e-10);
    ++rows;
  }
  EXPECT_EQ(rows, 65);
}

TEST(RunExperiment, DouglasAndDiagnose) {
  const auto d = run_experiment(parse_experiment_config(R"({"subcommand":"douglas","n_quad":256})"), scratch("dg"));
  ASSERT_EQ(d.exit_code, 0);
  EXPECT_NEAR(json::parse(d.summary)["douglas"]["value"].get<double>(), 4 * std::numbers::pi * std::numbers::pi, 1e-9);
  const auto g = run_experiment(
      parse_experiment_config(R"({"subcommand":"diagnose","n_r":32,"n_theta":64,"map":{"preset":"affine","b":0.3}})"),
      scratch("diag"));
  ASSERT_EQ(g.exit_code, 0);
  EXPECT_LT(json::parse(g.summary)["diagnose"]["compat_residual"].get<double>(), 1e-8);
}
