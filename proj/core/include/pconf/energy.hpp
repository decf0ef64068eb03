#pragma once

#include <cstdint>
#include <vector>

#include "pconf/fields.hpp"

namespace pconf {

struct EnergyReport {
  double p = 2.0;
  double energy_p = 0.0;
  double energy_star_p = 0.0;
  double holder_lhs = 0.0;
  double holder_rhs = 0.0;
  std::size_t orientation_violations = 0;
};

// Smooth bump A exp(1/(t^2 - 1)), t = |z - c| / R, sampled with its exact Wirtinger derivatives.
struct TestFunction {
  cplx center;
  double radius = 0.0;
  double amplitude = 1.0;
  ComplexField phi;
  ComplexField phi_z;
  ComplexField phi_zbar;
};

TestFunction make_bump(const DiskGrid& grid, cplx center, double radius, double amplitude = 1.0);

// Seeded panel of bumps whose supports stay a fixed distance away from the pinned
// rings. Centres and radii depend only on the domain and seed, not on resolution,
// so the same panel can be compared across refinements.
std::vector<TestFunction> bump_panel(const DiskGrid& grid, int count, std::uint64_t seed);

struct ResidualReport {
  cplx inner_residual;
  cplx inverse_residual;
  double normalizer = 0.0;

  double relative_inner() const { return normalizer > 0.0 ? std::abs(inner_residual) / normalizer : 0.0; }
  double relative_inverse() const { return normalizer > 0.0 ? std::abs(inverse_residual) / normalizer : 0.0; }
};

// The discrete energy averages two quadrature rules that differ only in the radial
// difference: sum_k w_k (K_k^p[forward] + K_k^p[backward]) / 2. Each compact difference
// sees the ring-to-ring checkerboard that the centred stencil annihilates, so the
// average has no cheap grid-scale directions, and the symmetric pair keeps it second
// order. Diagnostics (distortion, residuals, Hopf) use the centred derivatives.

// Per-node contributions; their pairwise sum is energy_p.
void energy_density(const MappingField& m, double p, std::span<double> out);

double energy_p(const MappingField& m, double p);
// Smallest Jacobian seen by either rule of the energy.
double min_energy_jacobian(const MappingField& m);

// Quadrature of K^p J, averaged over the same two rules. The optional per-node weights (same grid) multiply the quadrature
// weights, e.g. to restrict the integral to part of the domain.
double energy_star(const MappingField& h, double p, const RealField* node_weights = nullptr);

// Complex gradient G_k = dE/d(re f_k) + i dE/d(im f_k) of the discrete energy.
// Pinned nodes carry zero. Throws if either rule has J <= 0 somewhere.
std::vector<cplx> energy_gradient(const MappingField& m, double p);

struct HolderBound {
  double lhs;
  double rhs;
};
HolderBound holder_bound(const MappingField& m, double p);

EnergyReport energy_report(const MappingField& m, double p);

cplx inner_variation_residual(const MappingField& m, double p, const TestFunction& phi);
cplx inverse_residual(const MappingField& h, double p, const TestFunction& phi);
// integral of K^p |grad phi| = integral of 2 K^p |phi_z|
double residual_normalizer(const MappingField& m, double p, const TestFunction& phi);

ResidualReport residual_report(const MappingField& m, double p, const TestFunction& phi);
std::vector<ResidualReport> residual_panel(const MappingField& m, double p, const std::vector<TestFunction>& panel);
double max_relative_inner(const std::vector<ResidualReport>& panel);
double max_relative_inverse(const std::vector<ResidualReport>& panel);

}  // namespace pconf
