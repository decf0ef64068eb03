#include "pconf/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pconf {

namespace {

double distortion_at(double u, double v, double eps_J) {
  const double J = u - v;
  return J > eps_J ? (u + v) / J : 1.0;
}

template <class Fn>
double quadrature(const DiskGrid& grid, Fn&& integrand) {
  std::vector<double> terms(grid.size());
  const auto w = grid.weights();
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = w[k] * integrand(k);
  return pairwise_sum(std::span<const double>(terms));
}

template <class Fn>
cplx quadrature_c(const DiskGrid& grid, Fn&& integrand) {
  std::vector<cplx> terms(grid.size());
  const auto w = grid.weights();
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = w[k] * integrand(k);
  return pairwise_sum(std::span<const cplx>(terms));
}

}  // namespace

TestFunction make_bump(const DiskGrid& grid, cplx center, double radius, double amplitude) {
  if (!(radius > 0.0)) throw std::invalid_argument("bump radius must be positive");
  const bool hits_hole = grid.r_min() > 0.0 && std::abs(center) - radius <= grid.r_min();
  if (std::abs(center) + radius >= 1.0 || hits_hole)
    throw std::invalid_argument("bump support must lie strictly inside the domain");
  TestFunction tf{center, radius, amplitude, grid.complex_field(), grid.complex_field(), grid.complex_field()};
  const double r2 = radius * radius;
  const auto nodes = grid.nodes();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const cplx d = nodes[k] - center;
    const double t2 = std::norm(d) / r2;
    if (t2 >= 1.0) continue;
    const double s = t2 - 1.0;
    const double phi = amplitude * std::exp(1.0 / s);
    const double g = -phi / (r2 * s * s);
    tf.phi[k] = phi;
    tf.phi_z[k] = g * std::conj(d);
    tf.phi_zbar[k] = g * d;
  }
  return tf;
}

std::vector<TestFunction> bump_panel(const DiskGrid& grid, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double inner = grid.r_min();
  const double margin = 0.05;
  const double lo = inner > 0.0 ? inner + margin : 0.0;
  const double hi = 1.0 - margin;
  // Radii large enough that a 64-cell angular grid resolves every bump.
  const double r_small = inner > 0.0 ? 0.3 * (hi - lo) : 0.2;
  const double r_large = inner > 0.0 ? 0.48 * (hi - lo) : 0.45;

  std::vector<TestFunction> panel;
  panel.reserve(count);
  for (int n = 0; n < count; ++n) {
    const double R = r_small + (r_large - r_small) * unit(rng);
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    double rc;
    if (inner > 0.0) {
      rc = lo + R + (hi - lo - 2.0 * R) * unit(rng);
    } else {
      rc = (hi - R) * std::sqrt(unit(rng));
    }
    panel.push_back(make_bump(grid, std::polar(rc, angle), R));
  }
  return panel;
}

void energy_density(const MappingField& m, double p, std::span<double> out) {
  const auto th = degeneracy_thresholds(m);
  const auto w = m.grid().weights();
  const auto& F = m.forward();
  const auto& B = m.backward();
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double kf = distortion_at(std::norm(F.dz[k]), std::norm(F.dzbar[k]), th.eps_J);
    const double kb = distortion_at(std::norm(B.dz[k]), std::norm(B.dzbar[k]), th.eps_J);
    out[k] = 0.5 * w[k] * (std::pow(kf, p) + std::pow(kb, p));
  }
}

double energy_p(const MappingField& m, double p) {
  if (p < 1.0) throw std::invalid_argument("energy exponent must be >= 1");
  std::vector<double> dens(m.grid().size());
  energy_density(m, p, dens);
  return pairwise_sum(std::span<const double>(dens));
}

double min_energy_jacobian(const MappingField& m) {
  double lo = std::numeric_limits<double>::infinity();
  for (const WirtingerPair* d : {&m.forward(), &m.backward()})
    for (std::size_t k = 0; k < m.f().size(); ++k) lo = std::min(lo, std::norm(d->dz[k]) - std::norm(d->dzbar[k]));
  return lo;
}

double energy_star(const MappingField& h, double p, const RealField* node_weights) {
  if (p < 1.0) throw std::invalid_argument("energy exponent must be >= 1");
  if (node_weights) h.grid().require(*node_weights);
  const auto th = degeneracy_thresholds(h);
  const auto& F = h.forward();
  const auto& B = h.backward();
  return quadrature(h.grid(), [&](std::size_t k) {
    const double mult = node_weights ? node_weights->values[k] : 1.0;
    auto term = [&](const WirtingerPair& d) {
      const double u = std::norm(d.dz[k]);
      const double v = std::norm(d.dzbar[k]);
      return std::pow(distortion_at(u, v, th.eps_J), p) * (u - v);
    };
    return 0.5 * mult * (term(F) + term(B));
  });
}

std::vector<cplx> energy_gradient(const MappingField& m, double p) {
  const DiskGrid& grid = m.grid();
  const std::size_t n = grid.size();
  const auto w = grid.weights();
  std::vector<cplx> alpha(n), beta(n), part(n), grad(n, 0.0);
  for (auto [d, stencil] : {std::pair{&m.forward(), RadialStencil::forward},
                            std::pair{&m.backward(), RadialStencil::backward}}) {
    const auto& P = d->dz.values;
    const auto& Q = d->dzbar.values;
    bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
    for (std::size_t k = 0; k < n; ++k) {
      const double u = std::norm(P[k]);
      const double v = std::norm(Q[k]);
      const double J = u - v;
      if (!(J > 0.0)) {
        bad = true;
        continue;
      }
      const double K = (u + v) / J;
      // Half weight per rule. dK/du = -2v / J^2, dK/dv = 2u / J^2; d|P|^2 contributes the other 2.
      const double common = 0.5 * w[k] * p * std::pow(K, p - 1.0) / (J * J);
      alpha[k] = 2.0 * common * (-2.0 * v) * P[k];
      beta[k] = 2.0 * common * (2.0 * u) * Q[k];
    }
    if (bad) throw std::domain_error("energy gradient needs J > 0 at every node");
    wirtinger_adjoint(alpha, beta, grid, part, stencil);
    for (std::size_t k = 0; k < n; ++k) grad[k] += part[k];
  }
  for (std::size_t k = 0; k < n; ++k)
    if (grid.is_pinned(k)) grad[k] = 0.0;
  return grad;
}

HolderBound holder_bound(const MappingField& m, double p) {
  const double e = p / (p + 1.0);
  const auto& F = m.forward();
  const auto& B = m.backward();
  const double s = quadrature(m.grid(), [&](std::size_t k) {
    return 0.5 * (std::pow(std::norm(F.dz[k]) + std::norm(F.dzbar[k]), e) +
                  std::pow(std::norm(B.dz[k]) + std::norm(B.dzbar[k]), e));
  });
  return {std::pow(s, p + 1.0), std::pow(std::numbers::pi, p) * energy_p(m, p)};
}

EnergyReport energy_report(const MappingField& m, double p) {
  EnergyReport r;
  r.p = p;
  r.energy_p = energy_p(m, p);
  r.energy_star_p = energy_star(m, p);
  const auto hb = holder_bound(m, p);
  r.holder_lhs = hb.lhs;
  r.holder_rhs = hb.rhs;
  r.orientation_violations = distortion(m).orientation_violations;
  return r;
}

cplx inner_variation_residual(const MappingField& m, double p, const TestFunction& phi) {
  m.grid().require(phi.phi);
  const auto b = distortion(m);
  return quadrature_c(m.grid(), [&](std::size_t k) {
    if (phi.phi_z[k] == 0.0) return cplx(0.0);
    const double Kp = std::pow(b.K[k], p);
    const cplx mu = b.mu[k];
    return 2.0 * p * Kp * std::conj(mu) / (1.0 + std::norm(mu)) * phi.phi_zbar[k] - Kp * phi.phi_z[k];
  });
}

cplx inverse_residual(const MappingField& h, double p, const TestFunction& phi) {
  h.grid().require(phi.phi);
  const auto b = distortion(h);
  return quadrature_c(h.grid(), [&](std::size_t k) {
    if (phi.phi_zbar[k] == 0.0) return cplx(0.0);
    return std::pow(b.K[k], p - 1.0) * h.fz()[k] * std::conj(h.fzbar()[k]) * phi.phi_zbar[k];
  });
}

double residual_normalizer(const MappingField& m, double p, const TestFunction& phi) {
  m.grid().require(phi.phi);
  const auto b = distortion(m);
  return quadrature(m.grid(), [&](std::size_t k) { return 2.0 * std::pow(b.K[k], p) * std::abs(phi.phi_z[k]); });
}

ResidualReport residual_report(const MappingField& m, double p, const TestFunction& phi) {
  return {inner_variation_residual(m, p, phi), inverse_residual(m, p, phi), residual_normalizer(m, p, phi)};
}

std::vector<ResidualReport> residual_panel(const MappingField& m, double p, const std::vector<TestFunction>& panel) {
  std::vector<ResidualReport> out;
  out.reserve(panel.size());
  for (const auto& phi : panel) out.push_back(residual_report(m, p, phi));
  return out;
}

double max_relative_inner(const std::vector<ResidualReport>& panel) {
  double worst = 0.0;
  for (const auto& r : panel) worst = std::max(worst, r.relative_inner());
  return worst;
}

double max_relative_inverse(const std::vector<ResidualReport>& panel) {
  double worst = 0.0;
  for (const auto& r : panel) worst = std::max(worst, r.relative_inverse());
  return worst;
}

}  // namespace pconf
