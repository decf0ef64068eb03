#pragma once

#include <iosfwd>
#include <vector>

#include "pconf/fields.hpp"

namespace pconf {

enum class Branch { below_1, above_1 };

// Radial maps f(z) = F(rho) e^{i theta} whose profile a = rho F'/F solves
//   rho^2 (a^2 - 1)(a^2 + 1)^{p-1} = alpha a^{p+1}.
// Every factor except (a^2 - 1) and alpha is positive, so a > 1 pairs with alpha > 0
// and a < 1 with alpha < 0.
struct RadialProfile {
  double p = 2.0;
  double alpha = 0.0;
  int m = 1;
  Branch branch = Branch::above_1;
  std::vector<double> rho;
  std::vector<double> a;
  std::vector<double> F;
  double C1 = 0.0;

  // Exact evaluation anywhere in (0, 1], independent of the stored samples.
  double a_at(double r) const;
  double F_at(double r) const;
  // F^{-1}(s) for s in (0, 1].
  double rho_of_F(double s) const;
};

// (rho^2 (a^2-1)(a^2+1)^{p-1} - alpha a^{p+1}) / |alpha a^{p+1}|; the sides grow like a^{2p}
// near rho -> 0, so only the relative form has a scale-free tolerance.
double profile_equation_residual(double p, double alpha, double rho, double a);

double solve_radial_a(double p, double alpha, double rho, Branch branch);

// log F = G(a) + C1 with G(a) = -(p-1)a/2 + (p-1) arctan a + (1/2) log|(a+1)/(a-1)|.
double radial_log_antiderivative(double p, double a);

RadialProfile radial_profile(double p, double alpha, Branch branch, std::vector<double> rho_grid);

// Branch implied by the sign of alpha.
Branch branch_for(double alpha);

MappingField radial_map(const RadialProfile& profile, std::shared_ptr<const DiskGrid> grid);
// h(w) = F^{-1}(|w|) w/|w| on a grid inside the image annulus.
MappingField radial_inverse_map(const RadialProfile& profile, std::shared_ptr<const DiskGrid> grid);

// Boundary traces on |z| = 1 and |z| = rho_inner together with the exact map.
BoundaryData radial_boundary(const RadialProfile& profile, double rho_inner);

// The inverse radial map has Hopf differential c / w^2 with c = -alpha / 2^{p+1}.
double radial_inverse_hopf_constant(double p, double alpha);

// Rows: rho, a, F, residual, preceded by a '#'-prefixed JSON header with p, alpha, C1.
void write_profile_csv(std::ostream& os, const RadialProfile& profile);

}  // namespace pconf
