#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "pconf/singular.hpp"

namespace pconf {

// Phi = K^{p-1} h_w conj(h_wbar) sampled on the grid of h.
struct HopfField {
  ComplexField phi;
  double holo_residual = 0.0;  // 0 when Phi is at round-off level (conformal h)
  double p = 2.0;
  std::size_t degenerate_nodes = 0;  // J <= eps_J; Phi is set to 0 there
};

// Nodes that enter the L1 norms of the Hopf diagnostics. Rings with a one-sided radial
// stencil are dropped, and on the disk so is the second ring, where a 1/w^2 field is
// least resolved.
RealField hopf_mask(const DiskGrid& grid);

// ||d Phi / d wbar||_1 * l / ||Phi||_1 over the mask, with l = r_max - r_min so that the
// number is dimensionless. 0 for a field that vanishes on the mask.
double holomorphy_residual(const ComplexField& field, const DiskGrid& grid);

HopfField hopf_differential(const MappingField& h, double p);

// The Hopf differential of the inverse of f, evaluated at w = f(z) without building the
// inverse: h_w = conj(f_z) / J and h_wbar = -f_zbar / J give
//   Phi(f(z)) = -K^{p-1} conj(f_z f_zbar) / J^2.
// Degenerate nodes carry 0.
ComplexField inverse_hopf_at_image(const MappingField& f, double p);

// Relative L1 distance between Phi and `expected` over the mask of Phi's grid.
double relative_l1_error(const ComplexField& phi, const DiskGrid& grid, const std::function<cplx(cplx)>& expected);

// Same, for Phi(f(z)) from inverse_hopf_at_image: the integral runs over the image,
// dw = J dz, and `expected` is evaluated at w = f(z).
double image_relative_l1_error(const ComplexField& phi_at_image, const MappingField& f,
                               const std::function<cplx(cplx)>& expected);

// The profile functions of the potential equation |F_z| = a_p(F_zbar).
double profile_a(double p, double s);
double profile_a_prime(double p, double s);  // +inf at s = 0
double profile_b(double p, double s);        // a_p^2
double profile_b_prime(double p, double s);
// Lower bound of a_p': p for p <= 2, 2 sqrt(p - 1) for p >= 2.
double ellipticity_floor(double p);

struct ProfileTables {
  double p = 2.0;
  double M_p = 0.0;
  double k_p = 0.0;
  std::vector<double> s;
  std::vector<double> a;
  std::vector<double> a_prime;
  std::vector<double> b;
  std::vector<double> b_prime;
};

// Samples on [0, s_max], geometrically graded toward 0 where a_p' blows up.
ProfileTables profile_tables(double p, double s_max, int n_samples);

struct PotentialField {
  ComplexField F;
  ComplexField Fz;
  ComplexField Fzbar;
  // Relative L1 deviation of |F_z| from a_p(Re F_zbar) over the fitting region.
  double compat_residual = 0.0;
  // Smallest Re F_zbar in the fitting region (F_zbar = K^p - 1 >= 0).
  double min_Fzbar = 0.0;
  // The region r <= fit_radius where F is reconstructed.
  RealField region;
};

// Builds F with F_z = 2p K^p conj(mu) / (1 + |mu|^2) and F_zbar = K^p - 1 on |z| <= fit_radius.
// The zbar-part comes from a Cauchy transform of a smoothly cut-off b; the holomorphic
// remainder a - d/dz C(chi b) is fitted by a power series (Laurent on the annulus) and
// integrated. F is gauged to 0 at node 0.
PotentialField reconstruct_potential(const MappingField& m, double p, const TransformPlan& plan,
                                     double fit_radius = 0.65);
// Plan sized for reconstruct_potential: box of side 3.8 around the disk. The smooth
// cut-off needs spacing <= 0.01, so n_fft >= 380.
TransformPlan potential_plan(int n_fft = 512);

// Rows: r, theta, re_phi, im_phi.
void write_hopf_csv(std::ostream& os, const HopfField& field, const DiskGrid& grid);
// Rows: s, a, a_prime, b, b_prime.
void write_profile_tables_csv(std::ostream& os, const ProfileTables& tables);

}  // namespace pconf
