#include "pconf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "json_io.hpp"
#include "pconf/io.hpp"
#include "pconf/radial.hpp"
#include "pconf/singular.hpp"

#ifndef PCONF_VERSION
#define PCONF_VERSION "unknown"
#endif

namespace pconf {

using detail::Json;
using detail::number;

namespace {

const std::set<std::string> kSubcommands{"solve", "sweep", "radial", "beltrami", "diagnose", "douglas"};

void require_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

template <class T>
void read(const Json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "' in " + where);
  }
}

cplx read_complex(const Json& v, const std::string& what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(what + " must be a number or a [re, im] pair");
}

Json complex_json(cplx c) { return Json::array({c.real(), c.imag()}); }

// "name" or "name(a, b)" shorthand for presets.
std::pair<std::string, std::vector<double>> split_preset(const std::string& s) {
  static const std::regex form(R"(^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$)");
  std::smatch m;
  if (!std::regex_match(s, m, form)) throw ConfigError("cannot parse preset '" + s + "'");
  std::vector<double> args;
  if (m[2].matched) {
    std::stringstream ss(m[2].str());
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(tok, &used));
        if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError("bad preset argument '" + tok + "' in '" + s + "'");
      }
    }
  }
  return {m[1].str(), args};
}

BoundarySpec parse_boundary(const Json& v) {
  BoundarySpec b;
  if (v.is_string()) {
    auto [name, args] = split_preset(v.get<std::string>());
    b.preset = name;
    auto want = [&](std::size_t n) {
      if (args.size() != n) throw ConfigError("preset '" + name + "' takes " + std::to_string(n) + " argument(s)");
    };
    if (name == "identity") {
      want(0);
    } else if (name == "rotation") {
      want(1);
      b.c = args[0];
    } else if (name == "sinusoidal") {
      want(1);
      b.eps = args[0];
    } else if (name == "radial_oracle") {
      want(2);
      b.p = args[0];
      b.alpha = args[1];
    } else {
      throw ConfigError("unknown boundary preset '" + name + "' (fourier needs the object form)");
    }
    return b;
  }
  require_keys(v, {"preset", "c", "eps", "p", "alpha", "coefficients"}, "boundary");
  read(v, "preset", b.preset, "boundary");
  read(v, "c", b.c, "boundary");
  read(v, "eps", b.eps, "boundary");
  read(v, "p", b.p, "boundary");
  read(v, "alpha", b.alpha, "boundary");
  if (v.contains("coefficients")) {
    const Json& cs = v.at("coefficients");
    if (!cs.is_array()) throw ConfigError("boundary.coefficients must be a list of [n, re, im]");
    for (const auto& c : cs) {
      if (!c.is_array() || c.size() != 3 || !c[0].is_number_integer() || !c[1].is_number() || !c[2].is_number())
        throw ConfigError("boundary.coefficients entries must be [n, re, im] with integer n");
      b.coefficients[c[0].get<int>()] += cplx(c[1].get<double>(), c[2].get<double>());
    }
  }
  return b;
}

Json boundary_json(const BoundarySpec& b) {
  Json j;
  j["preset"] = b.preset;
  if (b.preset == "rotation") j["c"] = b.c;
  if (b.preset == "sinusoidal") j["eps"] = b.eps;
  if (b.preset == "radial_oracle") {
    j["p"] = b.p;
    j["alpha"] = b.alpha;
  }
  if (b.preset == "fourier") {
    Json cs = Json::array();
    for (const auto& [n, c] : b.coefficients) cs.push_back(Json::array({n, c.real(), c.imag()}));
    j["coefficients"] = std::move(cs);
  }
  return j;
}

SolverConfig parse_solver(const Json& v) {
  SolverConfig s;
  require_keys(v, {"max_iters", "grad_tol", "step_init", "armijo_c", "j_floor", "seed", "memory", "panel_size"}, "solver");
  read(v, "max_iters", s.max_iters, "solver");
  read(v, "grad_tol", s.grad_tol, "solver");
  read(v, "step_init", s.step_init, "solver");
  read(v, "armijo_c", s.armijo_c, "solver");
  read(v, "j_floor", s.j_floor, "solver");
  read(v, "seed", s.seed, "solver");
  read(v, "memory", s.memory, "solver");
  read(v, "panel_size", s.panel_size, "solver");
  return s;
}

Json solver_json(const SolverConfig& s) {
  return {{"max_iters", s.max_iters}, {"grad_tol", s.grad_tol}, {"step_init", s.step_init},
          {"armijo_c", s.armijo_c},   {"j_floor", s.j_floor},   {"seed", s.seed},
          {"memory", s.memory},       {"panel_size", s.panel_size}};
}

MuSpec parse_mu(const Json& v) {
  MuSpec m;
  require_keys(v, {"preset", "value", "p", "alpha", "truncate_m"}, "mu");
  read(v, "preset", m.preset, "mu");
  if (v.contains("value")) m.value = read_complex(v.at("value"), "mu.value");
  read(v, "p", m.p, "mu");
  read(v, "alpha", m.alpha, "mu");
  read(v, "truncate_m", m.truncate_m, "mu");
  return m;
}

MapSpec parse_map(const Json& v) {
  MapSpec m;
  require_keys(v, {"preset", "a", "b", "path"}, "map");
  read(v, "preset", m.preset, "map");
  if (v.contains("a")) m.a = read_complex(v.at("a"), "map.a");
  if (v.contains("b")) m.b = read_complex(v.at("b"), "map.b");
  read(v, "path", m.path, "map");
  return m;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!kSubcommands.count(subcommand)) throw ConfigError("subcommand must be one of solve, sweep, radial, beltrami, diagnose, douglas");
  if (domain != "disk" && domain != "annulus") throw ConfigError("domain must be 'disk' or 'annulus'");
  if (domain == "annulus" && !(rho_inner > 0.0 && rho_inner < 1.0)) throw ConfigError("rho_inner must lie in (0, 1)");
  if (n_r < 4 || n_theta < 8 || n_theta % 2 != 0) throw ConfigError("grid needs n_r >= 4 and even n_theta >= 8");
  static const std::set<std::string> bpresets{"identity", "rotation", "fourier", "sinusoidal", "radial_oracle"};
  if (!bpresets.count(boundary.preset)) throw ConfigError("unknown boundary preset '" + boundary.preset + "'");
  if (boundary.preset == "fourier" && boundary.coefficients.empty()) throw ConfigError("fourier boundary needs coefficients");
  if (boundary.preset == "radial_oracle" && domain != "annulus" && (subcommand == "solve" || subcommand == "sweep"))
    throw ConfigError("radial_oracle boundary data needs the annulus domain");
  if (!(p >= 1.0)) throw ConfigError("p must be >= 1");
  if (subcommand == "sweep") {
    try {
      ContinuationSchedule{p_schedule}.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("p_schedule: ") + e.what());
    }
  }
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  if (fft_n < 8 || (fft_n & (fft_n - 1)) != 0) throw ConfigError("fft_n must be a power of two >= 8");
  if (!(fft_padding >= 2.0)) throw ConfigError("fft_padding must be >= 2");
  if (potential_fft_n < 512 || (potential_fft_n & (potential_fft_n - 1)) != 0)
    throw ConfigError("potential_fft_n must be a power of two >= 512");
  static const std::set<std::string> mpresets{"constant_disk", "radial_oracle"};
  if (!mpresets.count(mu.preset)) throw ConfigError("unknown mu preset '" + mu.preset + "'");
  if (mu.truncate_m != 0 && mu.truncate_m < 2) throw ConfigError("mu.truncate_m must be 0 or >= 2");
  static const std::set<std::string> maps{"boundary", "affine", "radial_oracle", "csv"};
  if (!maps.count(map.preset)) throw ConfigError("unknown map preset '" + map.preset + "'");
  if (map.preset == "csv" && map.path.empty()) throw ConfigError("map.path is required for the csv preset");
  if (!(rho_min > 0.0 && rho_min < 1.0) || n_samples < 2) throw ConfigError("radial needs rho_min in (0,1) and n_samples >= 2");
  if (n_quad < 8) throw ConfigError("n_quad must be >= 8");
  if (!(beltrami_tol > 0.0) || beltrami_max_iter < 1) throw ConfigError("beltrami_tol and beltrami_max_iter must be positive");
  if (!(s_max > 0.0)) throw ConfigError("s_max must be positive");
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const std::string where = "config";
  require_keys(j,
               {"subcommand", "domain", "rho_inner", "n_r", "n_theta", "boundary", "p", "p_schedule", "solver", "seed", "mu",
                "fft_n", "fft_padding", "beltrami_tol", "beltrami_max_iter", "alpha", "rho_min", "n_samples", "n_quad",
                "map", "potential_fft_n", "s_max"},
               where);
  ExperimentConfig c;
  read(j, "subcommand", c.subcommand, where);
  read(j, "domain", c.domain, where);
  read(j, "rho_inner", c.rho_inner, where);
  read(j, "n_r", c.n_r, where);
  read(j, "n_theta", c.n_theta, where);
  if (j.contains("boundary")) c.boundary = parse_boundary(j.at("boundary"));
  read(j, "p", c.p, where);
  read(j, "p_schedule", c.p_schedule, where);
  if (j.contains("solver")) c.solver = parse_solver(j.at("solver"));
  if (j.contains("seed")) {
    read(j, "seed", c.seed, where);
    c.solver.seed = c.seed;
  } else {
    c.seed = c.solver.seed;
  }
  if (j.contains("mu")) c.mu = parse_mu(j.at("mu"));
  read(j, "fft_n", c.fft_n, where);
  read(j, "fft_padding", c.fft_padding, where);
  read(j, "beltrami_tol", c.beltrami_tol, where);
  read(j, "beltrami_max_iter", c.beltrami_max_iter, where);
  read(j, "alpha", c.alpha, where);
  read(j, "rho_min", c.rho_min, where);
  read(j, "n_samples", c.n_samples, where);
  read(j, "n_quad", c.n_quad, where);
  if (j.contains("map")) c.map = parse_map(j.at("map"));
  read(j, "potential_fft_n", c.potential_fft_n, where);
  read(j, "s_max", c.s_max, where);
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

namespace {

Json config_json(const ExperimentConfig& c) {
  Json j;
  j["subcommand"] = c.subcommand;
  j["domain"] = c.domain;
  j["rho_inner"] = c.rho_inner;
  j["n_r"] = c.n_r;
  j["n_theta"] = c.n_theta;
  j["boundary"] = boundary_json(c.boundary);
  j["p"] = c.p;
  j["p_schedule"] = c.p_schedule;
  j["solver"] = solver_json(c.solver);
  j["seed"] = c.seed;
  j["mu"] = {{"preset", c.mu.preset}, {"value", complex_json(c.mu.value)}, {"p", c.mu.p}, {"alpha", c.mu.alpha},
             {"truncate_m", c.mu.truncate_m}};
  j["fft_n"] = c.fft_n;
  j["fft_padding"] = c.fft_padding;
  j["beltrami_tol"] = c.beltrami_tol;
  j["beltrami_max_iter"] = c.beltrami_max_iter;
  j["alpha"] = c.alpha;
  j["rho_min"] = c.rho_min;
  j["n_samples"] = c.n_samples;
  j["n_quad"] = c.n_quad;
  j["map"] = {{"preset", c.map.preset}, {"a", complex_json(c.map.a)}, {"b", complex_json(c.map.b)}, {"path", c.map.path}};
  j["potential_fft_n"] = c.potential_fft_n;
  j["s_max"] = c.s_max;
  return j;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

namespace {

struct Context {
  const ExperimentConfig& cfg;
  std::filesystem::path dir;
  RunOutcome& out;

  std::ofstream open(const std::string& name) {
    const auto path = dir / name;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    out.files.push_back(path);
    return os;
  }
};

std::shared_ptr<const DiskGrid> make_grid(const ExperimentConfig& c) {
  const Domain d = c.domain == "disk" ? Domain::disk() : Domain::annulus(c.rho_inner);
  return std::make_shared<const DiskGrid>(d, c.n_r, c.n_theta);
}

RadialProfile oracle_profile(double p, double alpha, double rho_lo) {
  if (alpha == 0.0) throw ConfigError("radial oracle needs alpha != 0");
  return radial_profile(p, alpha, branch_for(alpha), {rho_lo, 1.0});
}

BoundaryTrace outer_trace(const BoundarySpec& b) {
  if (b.preset == "identity") return identity_trace();
  if (b.preset == "rotation") return rotation_trace(b.c);
  if (b.preset == "sinusoidal") return sinusoidal_trace(b.eps);
  if (b.preset == "fourier") return BoundaryTrace(b.coefficients);
  return identity_trace();  // radial_oracle: the outer circle is fixed
}

// Annulus data for presets other than the radial oracle scale the outer trace onto the inner circle.
BoundaryData boundary_data(const ExperimentConfig& c) {
  if (c.boundary.preset == "radial_oracle")
    return radial_boundary(oracle_profile(c.boundary.p, c.boundary.alpha, c.rho_inner), c.rho_inner);
  BoundaryData d = boundary_from_trace(outer_trace(c.boundary));
  if (c.domain == "annulus") {
    std::map<int, cplx> coeffs;
    for (int n = -d.outer.order(); n <= d.outer.order(); ++n) coeffs[n] = c.rho_inner * d.outer.coeff(n);
    d.inner = BoundaryTrace(std::move(coeffs));
  }
  return d;
}

double relative_l2(const MappingField& a, const MappingField& b) {
  const auto w = a.grid().weights();
  std::vector<double> num(w.size()), den(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    num[k] = w[k] * std::norm(a.f()[k] - b.f()[k]);
    den[k] = w[k] * std::norm(b.f()[k]);
  }
  return std::sqrt(pairwise_sum(std::span<const double>(num)) / pairwise_sum(std::span<const double>(den)));
}

// The Hopf differential of the inverse, through a pseudo-inverse on a grid of the image.
Json inverse_hopf_json(const MappingField& f, double p, const BoundaryData& data, Context& ctx) {
  std::shared_ptr<const DiskGrid> image;
  if (f.grid().domain().kind == DomainKind::disk) {
    image = std::make_shared<const DiskGrid>(Domain::disk(), f.grid().n_r(), f.grid().n_theta());
  } else {
    double r = 0.0;
    const int M = 256;
    for (int s = 0; s < M; ++s) r += std::abs((*data.inner)(2.0 * std::numbers::pi * s / M)) / M;
    image = std::make_shared<const DiskGrid>(Domain::annulus(r), f.grid().n_r(), f.grid().n_theta());
  }
  const auto inv = pseudo_inverse(f, image);
  const auto hopf = hopf_differential(inv.h, p);
  auto os = ctx.open("hopf.csv");
  write_hopf_csv(os, hopf, *image);
  return {{"holo_residual", number(hopf.holo_residual)},
          {"pseudo_inverse_unresolved", inv.unresolved},
          {"pseudo_inverse_defect", number(inv.max_defect)},
          {"degenerate_nodes", hopf.degenerate_nodes}};
}

Json solve_json(const SolveResult& r, const BoundaryData& data, Context& ctx) {
  const auto& c = ctx.cfg;
  Json j;
  j["energy_p"] = number(r.report.energy_p);
  j["max_relative_residual"] = number(r.max_relative_residual);
  j["result"] = detail::json_of(r);
  j["hopf"] = inverse_hopf_json(r.mapping, r.p, data, ctx);
  j["holo_residual"] = j["hopf"]["holo_residual"];
  if (c.boundary.preset == "radial_oracle") {
    const auto prof = oracle_profile(c.boundary.p, c.boundary.alpha, c.rho_inner);
    const auto exact = radial_map(prof, r.mapping.grid_ptr());
    const double hc = radial_inverse_hopf_constant(c.boundary.p, c.boundary.alpha);
    const auto phi = inverse_hopf_at_image(r.mapping, r.p);
    j["oracle"] = {{"relative_l2", number(relative_l2(r.mapping, exact))},
                   {"hopf_constant", number(hc)},
                   {"hopf_relative_l1", number(image_relative_l1_error(phi, r.mapping, [hc](cplx w) { return hc / (w * w); }))}};
  }
  if (r.mapping.grid().domain().kind == DomainKind::disk && r.p > 1.0) {
    const auto pf = reconstruct_potential(r.mapping, r.p, potential_plan(c.potential_fft_n));
    j["potential"] = {{"compat_residual", number(pf.compat_residual)}, {"min_Fzbar", number(pf.min_Fzbar)}};
  }
  {
    auto os = ctx.open("mapping.csv");
    write_field_csv(os, r.mapping.f(), r.mapping.grid());
  }
  {
    auto os = ctx.open("distortion.csv");
    write_distortion_csv(os, distortion(r.mapping), r.mapping.grid());
  }
  return j;
}

int run_solve(Context& ctx, Json& summary) {
  const auto& c = ctx.cfg;
  const auto grid = make_grid(c);
  const BoundaryData data = boundary_data(c);
  const SolveResult r = minimize(data, c.p, grid, c.solver);
  summary.update(solve_json(r, data, ctx));
  return r.converged ? 0 : 2;
}

int run_sweep(Context& ctx, Json& summary) {
  const auto& c = ctx.cfg;
  const auto grid = make_grid(c);
  const BoundaryData data = boundary_data(c);
  const ContinuationSchedule schedule{c.p_schedule};
  const auto results = continuation(data, schedule, grid, c.solver);

  Json steps = Json::array();
  for (const auto& r : results) steps.push_back(detail::json_of(r));
  summary["steps"] = std::move(steps);
  const bool complete = results.size() == c.p_schedule.size() && results.back().converged;
  summary["complete"] = complete;

  std::vector<double> distance(results.size(), std::nan(""));
  if (complete && !schedule.ascending() && grid->domain().kind == DomainKind::disk) {
    const auto rows = harmonic_limit_table(results, grid);
    for (std::size_t k = 0; k < rows.size(); ++k) distance[k] = rows[k].distance;
    Json d = Json::array();
    for (double x : distance) d.push_back(number(x));
    summary["harmonic_distance"] = std::move(d);
  }
  double k_est = std::nan("");
  if (complete && schedule.ascending() && results.size() >= 3) {
    const auto teich = teich_diagnostics(results);
    k_est = teich.k_estimate;
    summary["k_estimate"] = number(k_est);
    summary["teich"] = detail::json_of(teich);
    summary["cross_violation"] = number(cross_evaluation_violation(results));
  }
  auto os = ctx.open("sweep.csv");
  os << "p,energy,root,k_est,flatness,distance\n" << std::setprecision(17);
  for (std::size_t k = 0; k < results.size(); ++k) {
    const double e = results[k].report.energy_p;
    os << results[k].p << ',' << e << ',' << std::pow(e / std::numbers::pi, 1.0 / results[k].p) << ',' << k_est << ','
       << mu_flatness(results[k].mapping) << ',' << distance[k] << '\n';
  }
  return complete ? 0 : 2;
}

int run_radial(Context& ctx, Json& summary) {
  const auto& c = ctx.cfg;
  std::vector<double> rho(c.n_samples);
  for (int k = 0; k < c.n_samples; ++k) rho[k] = c.rho_min + (1.0 - c.rho_min) * k / (c.n_samples - 1);
  if (c.alpha == 0.0) throw ConfigError("radial needs alpha != 0");
  const auto prof = radial_profile(c.p, c.alpha, branch_for(c.alpha), rho);
  double worst = 0.0;
  for (std::size_t k = 0; k < prof.rho.size(); ++k)
    worst = std::max(worst, std::abs(profile_equation_residual(c.p, c.alpha, prof.rho[k], prof.a[k])));
  summary["profile"] = {{"p", c.p},
                        {"alpha", c.alpha},
                        {"branch", prof.branch == Branch::above_1 ? "above_1" : "below_1"},
                        {"C1", number(prof.C1)},
                        {"max_equation_residual", number(worst)},
                        {"F_at_rho_min", number(prof.F.front())},
                        {"hopf_constant_of_inverse", number(radial_inverse_hopf_constant(c.p, c.alpha))}};
  auto os = ctx.open("profile.csv");
  write_profile_csv(os, prof);
  return 0;
}

int run_beltrami(Context& ctx, Json& summary) {
  const auto& c = ctx.cfg;
  const auto plan = TransformPlan::around_disk(c.fft_n, 1.0, c.fft_padding);
  BoxField mu = box_field(plan);
  if (c.mu.preset == "constant_disk") {
    mu = disk_indicator(plan);
    for (auto& v : mu.values) v *= c.mu.value;
  } else {
    const auto prof = oracle_profile(c.mu.p, c.mu.alpha, c.rho_inner);
    for (int iy = 0; iy < plan.n_fft(); ++iy)
      for (int ix = 0; ix < plan.n_fft(); ++ix) {
        const cplx z = plan.node(ix, iy);
        const double r = std::abs(z);
        if (r <= c.rho_inner || r >= 1.0) continue;
        const double a = prof.a_at(r);
        mu[plan.index(ix, iy)] = (z / r) * (z / r) * ((a - 1.0) / (a + 1.0));
      }
  }
  if (c.mu.truncate_m >= 2) mu = truncate_mu(mu, c.mu.truncate_m);
  const auto problem = beltrami_problem(mu, plan);
  const auto sol = solve_beltrami(problem, plan, c.beltrami_tol, c.beltrami_max_iter);
  Json j = detail::json_of(sol);
  j["k_inf"] = number(problem.k_inf);
  j["box_size"] = plan.box_size();
  if (c.mu.preset == "constant_disk") {
    double inside = 0.0, outside = 0.0;
    const cplx k = c.mu.value;
    for (int iy = 0; iy < plan.n_fft(); ++iy)
      for (int ix = 0; ix < plan.n_fft(); ++ix) {
        const cplx z = plan.node(ix, iy);
        const double r = std::abs(z);
        const cplx f = sol.f[plan.index(ix, iy)];
        if (r < 0.9) inside = std::max(inside, std::abs(f - (z + k * std::conj(z))));
        if (r > 1.1 && r < 2.0) outside = std::max(outside, std::abs(f - (z + k / z)));
      }
    j["max_error_inside"] = number(inside);
    j["max_error_outside"] = number(outside);
  }
  summary["beltrami"] = std::move(j);
  const auto grid = std::make_shared<const DiskGrid>(Domain::disk(), c.n_r, c.n_theta);
  const auto m = beltrami_mapping(sol, plan, grid);
  auto os = ctx.open("beltrami_map.csv");
  write_field_csv(os, m.f(), *grid);
  return sol.converged ? 0 : 2;
}

int run_diagnose(Context& ctx, Json& summary) {
  const auto& c = ctx.cfg;
  const auto grid = make_grid(c);
  std::optional<MappingField> m;
  if (c.map.preset == "boundary") {
    m = initial_guess(boundary_data(c), grid);
  } else if (c.map.preset == "affine") {
    m = MappingField::sample(grid, [&](cplx z) { return c.map.a * z + c.map.b * std::conj(z); });
  } else if (c.map.preset == "radial_oracle") {
    if (grid->domain().kind != DomainKind::annulus) throw ConfigError("radial_oracle map needs the annulus domain");
    m = radial_map(oracle_profile(c.boundary.p, c.boundary.alpha, c.rho_inner), grid);
  } else {
    std::ifstream in(c.map.path);
    if (!in) throw ConfigError("cannot read map file " + c.map.path);
    try {
      m = MappingField(grid, read_field_csv(in, *grid));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("map file: ") + e.what());
    }
  }
  const auto bundle = distortion(*m);
  double kmax = 1.0;
  for (double k : bundle.K.values) kmax = std::max(kmax, k);
  const auto panel = residual_panel(*m, c.p, bump_panel(*grid, c.solver.panel_size, c.solver.seed));
  Json j;
  j["report"] = detail::json_of(energy_report(*m, c.p));
  j["max_relative_residual"] = number(max_relative_inner(panel));
  j["max_relative_inverse_residual"] = number(max_relative_inverse(panel));
  j["max_K"] = number(kmax);
  j["degenerate_nodes"] = bundle.degenerate_nodes;
  j["orientation_violations"] = bundle.orientation_violations;
  const auto hopf = hopf_differential(*m, c.p);
  j["holo_residual"] = number(hopf.holo_residual);
  {
    auto os = ctx.open("distortion.csv");
    write_distortion_csv(os, bundle, *grid);
  }
  {
    auto os = ctx.open("hopf.csv");
    write_hopf_csv(os, hopf, *grid);
  }
  if (c.p > 1.0) {
    const auto tables = profile_tables(c.p, c.s_max, 2001);
    j["M_p"] = tables.M_p;
    j["k_p"] = tables.k_p;
    auto os = ctx.open("profile_tables.csv");
    write_profile_tables_csv(os, tables);
    if (grid->domain().kind == DomainKind::disk) {
      const auto pf = reconstruct_potential(*m, c.p, potential_plan(c.potential_fft_n));
      j["compat_residual"] = number(pf.compat_residual);
      auto pos = ctx.open("potential.csv");
      write_field_csv(pos, pf.F, *grid);
    }
  }
  summary["diagnose"] = std::move(j);
  return 0;
}

int run_douglas(Context& ctx, Json& summary) {
  const auto rep = douglas_integral(outer_trace(ctx.cfg.boundary), ctx.cfg.n_quad);
  summary["douglas"] = detail::json_of(rep);
  return 0;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  RunOutcome out;
  try {
    config.validate();
  } catch (const ConfigError& e) {
    out.exit_code = 1;
    out.message = e.what();
    return out;
  }
  std::filesystem::create_directories(out_dir);
  Context ctx{config, out_dir, out};
  Json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["version"] = PCONF_VERSION;
  summary["subcommand"] = config.subcommand;
  summary["config"] = config_json(config);
  try {
    const std::string& s = config.subcommand;
    if (s == "solve")
      out.exit_code = run_solve(ctx, summary);
    else if (s == "sweep")
      out.exit_code = run_sweep(ctx, summary);
    else if (s == "radial")
      out.exit_code = run_radial(ctx, summary);
    else if (s == "beltrami")
      out.exit_code = run_beltrami(ctx, summary);
    else if (s == "diagnose")
      out.exit_code = run_diagnose(ctx, summary);
    else
      out.exit_code = run_douglas(ctx, summary);
  } catch (const ConfigError& e) {
    out.exit_code = 1;
    out.message = e.what();
    return out;
  }
  out.message = out.exit_code == 0 ? "complete" : "a solve did not converge";
  summary["exit_code"] = out.exit_code;
  out.summary = summary.dump(2);
  const auto path = out_dir / "summary.json";
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << out.summary << '\n';
  out.files.push_back(path);
  return out;
}

}  // namespace pconf
