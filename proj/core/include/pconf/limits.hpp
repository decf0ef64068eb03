#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pconf/hopf.hpp"
#include "pconf/optimizer.hpp"

namespace pconf {

// Mode-wise harmonic extension c_n e^{in theta} -> c_n r^{|n|} e^{in theta}.
MappingField poisson_extend(const BoundaryTrace& boundary, std::shared_ptr<const DiskGrid> grid);

// sqrt((E/pi - 1) / (E/pi + 1)). Values within 1e-8 relative below pi count as pi.
double teich_k(double e_star);

// Xi = Phi / ||Phi||_1 for a differential sampled at `points` with area weights.
struct NormalizedDifferential {
  std::vector<cplx> xi;
  double l1_norm = 0.0;    // of xi, 1 up to round-off
  double sup_inner = 0.0;  // max |xi| over |w| <= inner_radius
  bool degenerate = false;  // sup_inner < delta
};
NormalizedDifferential normalize_differential(std::span<const cplx> phi, std::span<const cplx> points,
                                              std::span<const double> area_weights, double delta = 1e-2,
                                              double inner_radius = 0.5);

// Area-weighted standard deviation of |mu| over the free nodes inside the Hopf mask,
// weighted by image area J dz; |mu_h(f(z))| = |mu_f(z)|, so this is the spread of |mu_h|.
double mu_flatness(const MappingField& f);

struct TeichReport {
  std::vector<double> p_sweep;
  std::vector<double> energies;  // E_p(f_p) = E*_p(h_p)
  std::vector<double> roots;     // (E*_p / pi)^{1/p}
  double extrapolated_root = 1.0;
  double k_estimate = 0.0;
  std::vector<double> mu_flatness;  // area-weighted std of |mu_h| over the image of the free nodes
  NormalizedDifferential xi;        // for the largest p, sampled at w = f(z)
  bool degenerate = false;
  std::vector<std::string> warnings;
};

// Needs at least three converged results in ascending p. The limit of the roots is
// extrapolated as a polynomial in 1/p through the last three sweep points.
TeichReport teich_diagnostics(const std::vector<SolveResult>& results, double delta = 1e-2);

// E[i][j] = E_{p_i}(f_j): energies of every computed map at every sweep exponent.
std::vector<std::vector<double>> cross_energies(const std::vector<SolveResult>& results);
// Largest relative violation of E_p(f_p) <= E_p(f_q) <= E_q(f_q) over the pairs p <= q
// (0 when the chain holds). Violations use the larger side as scale.
double cross_evaluation_violation(const std::vector<SolveResult>& results);

struct DouglasReport {
  double value = 0.0;          // at n_quad
  double refined_value = 0.0;  // at 2 n_quad
  double relative_change = 0.0;
  bool finite = false;  // both values finite and agreeing to 5e-4 relative
};

// Tensor midpoint rule on S x S for the integrand Q + |log Q|, Q = |(f0(z) - f0(x)) / (z - x)|^2.
// Pairs closer than 2 pi / n_quad take the diagonal value Q = |f0'|^2.
double douglas_value(const BoundaryTrace& boundary, int n_quad);
DouglasReport douglas_integral(const BoundaryTrace& boundary, int n_quad);

// Pseudo-inverse sampled on `target`: for each node w the nearest image node f(z_k)
// seeds a Newton solve of f(z) = w on the cubic interpolant of f. Nodes where Newton
// leaves the domain or stalls keep the nearest-image value and are counted.
struct PseudoInverse {
  MappingField h;
  std::size_t unresolved = 0;
  double max_defect = 0.0;  // max |f(h(w)) - w| over resolved nodes
};
PseudoInverse pseudo_inverse(const MappingField& f, std::shared_ptr<const DiskGrid> target);

// The inverse of a circle homeomorphism, as a trace of the given order.
BoundaryTrace inverse_trace(const BoundaryTrace& boundary, int order);

// max |a - b| over nodes with |w| <= radius.
double sup_distance(const MappingField& a, const MappingField& b, double radius);

struct HarmonicLimitRow {
  double p;
  double energy;
  double distance;  // pseudo-inverse vs Poisson extension of the inverse data
};
// For a descending sweep on the disk: distances measured on |w| <= radius of the target grid.
std::vector<HarmonicLimitRow> harmonic_limit_table(const std::vector<SolveResult>& results,
                                                   std::shared_ptr<const DiskGrid> target, double radius = 0.9);

// Rows: p, energy, root, k_est, flatness. k_est is the same extrapolated value on every row.
void write_sweep_csv(std::ostream& os, const TeichReport& report);

}  // namespace pconf
