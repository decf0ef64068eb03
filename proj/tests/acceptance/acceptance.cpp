// Prints one PASS/FAIL line per acceptance criterion and exits nonzero if any fails.
// Reference values come from closed forms or from the frozen oracle table.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracle_values.hpp"
#include "pconf/energy.hpp"
#include "pconf/fields.hpp"
#include "pconf/hopf.hpp"
#include "pconf/limits.hpp"
#include "pconf/optimizer.hpp"
#include "pconf/radial.hpp"
#include "pconf/singular.hpp"

using namespace pconf;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const char* fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    if (!detail.empty()) detail += "; ";
    detail += buf;
    if (!ok) {
      pass = false;
      detail += " [x]";
    }
  }
};

int failures = 0;

void run(int id, const char* name, double budget_s, const std::function<void(Outcome&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail += std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs < budget_s, "%.1fs < %.0fs", secs, budget_s);
  if (!out.pass) ++failures;
  std::printf("%s %2d %s: %s\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str());
  std::fflush(stdout);
}

std::shared_ptr<const DiskGrid> grid(Domain d, int n_r, int n_theta) {
  return std::make_shared<const DiskGrid>(d, n_r, n_theta);
}

double relative_l2(const MappingField& a, const MappingField& b) {
  long double num = 0.0L, den = 0.0L;
  const auto w = a.grid().weights();
  for (std::size_t k = 0; k < w.size(); ++k) {
    num += w[k] * std::norm(a.f()[k] - b.f()[k]);
    den += w[k] * std::norm(b.f()[k]);
  }
  return std::sqrt(static_cast<double>(num / den));
}

bool nonincreasing(const std::vector<double>& v, double rel_tol = 0.0) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[k - 1] * (1.0 + rel_tol)) return false;
  return true;
}

RadialProfile oracle_profile() { return radial_profile(2.0, 15.0 / 8.0, Branch::above_1, {0.5, 1.0}); }

void conformal_baseline(Outcome& out) {
  for (double p : {1.5, 2.0, 4.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto g = grid(Domain::disk(), 64, 128);
    const auto r = minimize(boundary_from_trace(identity_trace()), p, g, {});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto id = MappingField::sample(g, [](cplx z) { return z; });
    const double e_rel = std::abs(r.report.energy_p / kPi - 1.0);
    const double sup = sup_distance(r.mapping, id, 1.0);
    out.require(r.converged && e_rel < 1e-6 && sup < 1e-4 && secs < 30.0,
                "p=%g |E/pi-1|=%.1e sup=%.1e %.1fs", p, e_rel, sup, secs);
  }
}

void radial_reproduction(Outcome& out) {
  const auto prof = oracle_profile();
  // The library profile against the frozen table first; the map comparison below trusts it.
  double table_err = 0.0;
  for (const auto& row : oracle::kRadialP2)
    table_err = std::max({table_err, std::abs(prof.a_at(row[0]) / row[1] - 1.0), std::abs(prof.F_at(row[0]) / row[2] - 1.0)});
  out.require(table_err < 1e-12, "profile vs table %.1e", table_err);

  const auto g = grid(Domain::annulus(0.5), 128, 128);
  const auto r = minimize(radial_boundary(prof, 0.5), 2.0, g, {});
  out.require(r.converged, "converged=%d", int(r.converged));
  const double l2 = relative_l2(r.mapping, radial_map(prof, g));
  out.require(l2 < 1e-3, "relL2=%.2e", l2);

  const double c = oracle::kInverseHopfP2[0];
  const auto phi = inverse_hopf_at_image(r.mapping, 2.0);
  const double l1 = image_relative_l1_error(phi, r.mapping, [c](cplx w) { return c / (w * w); });
  out.require(l1 < 1e-3, "hopf relL1=%.2e", l1);
}

void residual_panel_check(Outcome& out) {
  struct Case {
    const char* label;
    std::function<double(int)> residual;  // max relative residual at n x 2n
  };
  const auto prof = oracle_profile();
  const std::vector<Case> cases = {
      {"radial oracle",
       [&](int n) {
         const auto g = grid(Domain::annulus(0.5), n, 2 * n);
         return max_relative_inner(residual_panel(radial_map(prof, g), 2.0, bump_panel(*g, 20, 1)));
       }},
      {"radial min",
       [&](int n) {
         const auto r = minimize(radial_boundary(prof, 0.5), 2.0, grid(Domain::annulus(0.5), n, 2 * n), {});
         return r.converged ? r.max_relative_residual : INFINITY;
       }},
      {"sinusoidal min p=2",
       [](int n) {
         const auto r = minimize(boundary_from_trace(sinusoidal_trace(0.2)), 2.0, grid(Domain::disk(), n, 2 * n), {});
         return r.converged ? r.max_relative_residual : INFINITY;
       }},
      {"sinusoidal min p=4",
       [](int n) {
         const auto r = minimize(boundary_from_trace(sinusoidal_trace(0.2)), 4.0, grid(Domain::disk(), n, 2 * n), {});
         return r.converged ? r.max_relative_residual : INFINITY;
       }},
  };
  for (const auto& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const double coarse = c.residual(128), fine = c.residual(256);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.require(coarse < 1e-2 && coarse >= 1.5 * fine && secs < 120.0, "%s %.1e -> %.1e %.0fs", c.label, coarse, fine,
                secs);
  }
}

void gradient_check(Outcome& out) {
  const auto g = grid(Domain::disk(), 32, 64);
  std::mt19937_64 rng(2024);
  // Smooth random perturbation: nodal noise would fold the innermost ring, whose
  // nodes are only r dtheta apart.
  std::normal_distribution<double> noise(0.0, 5e-3);
  std::vector<cplx> c(8);
  for (auto& x : c) x = {noise(rng), noise(rng)};
  const auto f = g->sample([&](cplx z) {
    cplx d = 0.0;
    for (int m = 0; m < 4; ++m) d += c[m] * std::pow(z, m + 2) + c[m + 4] * std::pow(std::conj(z), m + 1) * z;
    return z + 0.08 * z * z + 0.05 * std::conj(z * z) + d;
  });

  std::vector<std::size_t> free_nodes;
  for (std::size_t k = 0; k < g->size(); ++k)
    if (!g->is_pinned(k)) free_nodes.push_back(k);
  std::shuffle(free_nodes.begin(), free_nodes.end(), rng);
  free_nodes.resize(50);

  // Central differences of the energy, taken as sums of per-node density differences so
  // the O(1) total does not swamp them, and Richardson-extrapolated over h and h/2:
  // the innermost ring is only ~1e-3 wide, and there the plain h^2 error is too large.
  for (double p : {2.0, 2.7}) {
    const auto G = energy_gradient(MappingField(g, f), p);
    std::vector<double> dp(g->size()), dm(g->size());
    auto central = [&](std::size_t k, cplx step) {
      auto plus = f, minus = f;
      plus[k] += step;
      minus[k] -= step;
      energy_density(MappingField(g, plus), p, dp);
      energy_density(MappingField(g, minus), p, dm);
      long double diff = 0.0L;
      for (std::size_t j = 0; j < dp.size(); ++j) diff += static_cast<long double>(dp[j]) - dm[j];
      return static_cast<double>(diff) / (2.0 * std::abs(step));
    };
    const double h = 1e-6;
    double worst = 0.0;
    for (std::size_t k : free_nodes) {
      auto partial = [&](cplx dir) { return (4.0 * central(k, 0.5 * h * dir) - central(k, h * dir)) / 3.0; };
      const cplx fd(partial(1.0), partial(cplx(0.0, 1.0)));
      worst = std::max(worst, std::abs(fd - G[k]) / std::abs(G[k]));
    }
    out.require(worst < 1e-6, "p=%g max rel err %.1e over 50 nodes", p, worst);
  }
}

void profile_ellipticity(Outcome& out) {
  for (std::size_t i = 0; i < std::size(oracle::kProfileAPrimeMin); ++i) {
    const double p = oracle::kProfileAPrimeMin[i][0];
    const auto t = profile_tables(p, 1e4, 20001);
    const double min_a = *std::min_element(t.a_prime.begin(), t.a_prime.end());
    const double min_b = *std::min_element(t.b_prime.begin(), t.b_prime.end());
    // The floor itself against the root-refined infimum of the table.
    const bool floor_ok = t.M_p <= oracle::kProfileAPrimeMin[i][1] * (1.0 + 1e-12) &&
                          t.M_p >= oracle::kProfileAPrimeMin[i][1] * (1.0 - 1e-8);
    out.require(floor_ok && min_a >= t.M_p * (1.0 - 1e-8) && min_b >= 2.0 * p * (1.0 - 1e-8),
                "p=%g min a'/M=%.9f min b'/2p=%.9f", p, min_a / t.M_p, min_b / (2.0 * p));
  }
}

void beltrami_solver(Outcome& out) {
  const auto plan = TransformPlan::around_disk(1024, 1.0, 8.0);
  const auto chi = disk_indicator(plan);
  BoxField mu = chi;
  for (auto& v : mu.values) v *= 0.3;
  const auto sol = solve_beltrami(beltrami_problem(mu, plan), plan);
  double err = 0.0;
  for (int iy = 0; iy < plan.n_fft(); ++iy)
    for (int ix = 0; ix < plan.n_fft(); ++ix) {
      const cplx z = plan.node(ix, iy);
      if (std::abs(z) < 0.9) err = std::max(err, std::abs(sol.f[plan.index(ix, iy)] - (z + 0.3 * std::conj(z))));
    }
  out.require(sol.converged && err < 1e-3, "max err |z|<0.9 %.1e", err);
  out.require(sol.contraction_ratio <= 0.3 * 1.05, "contraction %.4f", sol.contraction_ratio);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  BoxField g = box_field(plan);
  std::complex<long double> mean = 0.0L;
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    g[k] = chi[k] * cplx(n01(rng), n01(rng));
    mean += std::complex<long double>(g[k].real(), g[k].imag());
  }
  mean /= static_cast<long double>(g.values.size());
  for (auto& v : g.values) v -= cplx(static_cast<double>(mean.real()), static_cast<double>(mean.imag()));
  const auto s = beurling_transform(g, plan);
  long double a = 0.0L, b = 0.0L;
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    a += std::norm(g[k]);
    b += std::norm(s[k]);
  }
  const double iso = std::abs(static_cast<double>(std::sqrt(b / a)) - 1.0);
  out.require(iso < 1e-12, "isometry defect %.1e", iso);
}

void potential_compatibility(Outcome& out) {
  const auto plan = potential_plan(512);
  {
    const auto g = grid(Domain::disk(), 64, 128);
    const auto aff = MappingField::sample(g, [](cplx z) { return z + 0.3 * std::conj(z); });
    const double c = reconstruct_potential(aff, 2.0, plan).compat_residual;
    out.require(c < 1e-8, "constant mu %.1e", c);
  }
  std::vector<double> compat;
  for (int n : {32, 64, 128}) {
    const auto g = grid(Domain::disk(), n, 2 * n);
    const auto r = minimize(boundary_from_trace(sinusoidal_trace(0.2)), 2.0, g, {});
    compat.push_back(r.converged ? reconstruct_potential(r.mapping, 2.0, plan).compat_residual : INFINITY);
  }
  out.require(compat.back() < 1e-2 && compat[1] < compat[0] && compat[2] < compat[1], "minimizer %.1e, %.1e, %.1e",
              compat[0], compat[1], compat[2]);
}

std::vector<SolveResult> sweep(std::vector<double> ps) {
  return continuation(boundary_from_trace(sinusoidal_trace(0.2)), {std::move(ps)}, grid(Domain::disk(), 128, 256), {});
}

void harmonic_regime(Outcome& out) {
  const auto results = sweep({2.0, 1.5, 1.2, 1.05});
  const bool all_converged =
      results.size() == 4 && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.converged; });
  out.require(all_converged, "converged=%d", int(all_converged));
  if (!all_converged) return;
  const auto table = harmonic_limit_table(results, results.front().mapping.grid_ptr());
  std::vector<double> energy, distance;
  for (const auto& row : table) {
    energy.push_back(row.energy);
    distance.push_back(row.distance);
  }
  out.require(nonincreasing(energy), "energy %.8f .. %.8f", energy.front(), energy.back());
  out.require(nonincreasing(distance), "distance %.3e .. %.3e", distance.front(), distance.back());
}

void extremal_regime(Outcome& out) {
  const auto results = sweep({2.0, 4.0, 8.0, 16.0});
  const bool all_converged =
      results.size() == 4 && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.converged; });
  out.require(all_converged, "converged=%d", int(all_converged));
  if (!all_converged) return;
  const double viol = cross_evaluation_violation(results);
  out.require(viol <= 1e-6, "cross violation %.1e", viol);
  const auto t = teich_diagnostics(results);
  out.require(nonincreasing(t.mu_flatness), "flatness %.4e .. %.4e", t.mu_flatness.front(), t.mu_flatness.back());
  out.require(t.k_estimate >= 0.0 && t.k_estimate < 1.0, "teich k %.4f", t.k_estimate);
}

void douglas(Outcome& out) {
  const double id = douglas_value(identity_trace(), 2048);
  const double id_rel = std::abs(id / (4.0 * kPi * kPi) - 1.0);
  out.require(id_rel < 1e-4, "identity rel err %.1e", id_rel);
  const auto s = douglas_integral(sinusoidal_trace(0.2), 2048);
  out.require(s.finite && s.relative_change < 5e-4, "sinusoidal change under doubling %.1e", s.relative_change);
  const double vs_oracle = std::abs(s.refined_value / oracle::kDouglasSinusoidal02 - 1.0);
  out.require(vs_oracle < 1e-6, "vs reference %.1e", vs_oracle);
}

}  // namespace

int main() {
  run(1, "conformal baseline", 90.0, conformal_baseline);
  run(2, "radial oracle reproduction", 300.0, radial_reproduction);
  run(3, "inner-variation residual", 480.0, residual_panel_check);
  run(4, "gradient vs finite differences", 60.0, gradient_check);
  run(5, "profile ellipticity", 1.0, profile_ellipticity);
  run(6, "Beltrami solver", 60.0, beltrami_solver);
  run(7, "potential compatibility", 60.0, potential_compatibility);
  run(8, "p -> 1 sweep", 900.0, harmonic_regime);
  run(9, "p -> infinity sweep", 1200.0, extremal_regime);
  run(10, "Douglas integral", 60.0, douglas);
  std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
