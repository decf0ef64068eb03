#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pconf/fields.hpp"

namespace pconf {

namespace detail {
class FftPlan;
}

// Square periodic box [-L/2, L/2)^2 sampled on n x n nodes, with the Fourier multipliers
// of the Cauchy and Beurling transforms. In the lattice frequency k = kx + i ky,
//   d/dzbar  ->  (i/2) k,   d/dz  ->  (i/2) conj(k),
// so the Cauchy transform (inverse of d/dzbar) is -2i/k and the Beurling transform is
// conj(k)/k. Both multipliers vanish at k = 0. Immutable and shareable.
class TransformPlan {
 public:
  TransformPlan(int n_fft, double box_size);

  // Box of side padding * 2 * radius around the disk |z| < radius; padding >= 2.
  static TransformPlan around_disk(int n_fft, double radius = 1.0, double padding = 2.0);

  int n_fft() const { return n_; }
  double box_size() const { return box_; }
  double spacing() const { return box_ / n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
  // Row-major in y: index(ix, iy) = iy * n + ix.
  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * n_ + ix; }
  cplx node(int ix, int iy) const { return {-0.5 * box_ + ix * spacing(), -0.5 * box_ + iy * spacing()}; }

  std::span<const cplx> cauchy_multiplier() const { return cauchy_; }
  std::span<const cplx> beurling_multiplier() const { return beurling_; }
  // (i/2) conj(k) and (i/2) k, for spectral Wirtinger derivatives of periodic fields.
  std::span<const cplx> dz_multiplier() const { return dz_; }
  std::span<const cplx> dzbar_multiplier() const { return dzbar_; }

  const detail::FftPlan& fft() const { return *fft_; }

 private:
  int n_;
  double box_;
  std::vector<cplx> cauchy_;
  std::vector<cplx> beurling_;
  std::vector<cplx> dz_;
  std::vector<cplx> dzbar_;
  std::shared_ptr<const detail::FftPlan> fft_;
};

struct BoxField {
  int n = 0;
  double box_size = 0.0;
  std::vector<cplx> values;

  cplx& operator[](std::size_t k) { return values[k]; }
  const cplx& operator[](std::size_t k) const { return values[k]; }
};

BoxField box_field(const TransformPlan& plan, cplx fill = 0.0);
void require_plan(const BoxField& field, const TransformPlan& plan);

// Area fraction of each box cell covered by |z| < radius (exact for cells clear of the
// circle, 32 x 32 subsampling for the cells it crosses).
BoxField disk_indicator(const TransformPlan& plan, double radius = 1.0);

// F with d F / d zbar = g. The periodic part uses the Cauchy multiplier; the mean of g,
// which no periodic field can produce, is restored as mean(g) * conj(z). The result is
// shifted to zero box mean. Throws if g does not vanish outside the central half box.
BoxField cauchy_transform(const BoxField& g, const TransformPlan& plan);
// Multiplier conj(k)/k with 0 at k = 0; an isometry on zero-mean fields.
BoxField beurling_transform(const BoxField& g, const TransformPlan& plan);

struct BoxWirtinger {
  BoxField dz;
  BoxField dzbar;
};
// Spectral Wirtinger derivatives of a periodic field.
BoxWirtinger box_wirtinger(const BoxField& field, const TransformPlan& plan);

struct BeltramiProblem {
  BoxField mu;
  double k_inf = 0.0;
  double q = 2.0;  // the solver works in L^2
};

// Validates that mu vanishes outside the unit disk (up to its boundary cells) and
// records k_inf = max |mu|. Throws if k_inf >= 1.
BeltramiProblem beltrami_problem(BoxField mu, const TransformPlan& plan);

struct BeltramiSolution {
  BoxField f;  // z + C g
  BoxField g;  // the density, f_zbar
  std::vector<double> update_norms;
  // Largest ratio of consecutive update norms while the updates stay above round-off.
  double contraction_ratio = 0.0;
  // ||g - mu (1 + S g)||_2 / ||1 + S g||_2, i.e. ||f_zbar - mu f_z|| / ||f_z||.
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string diagnosis;
};

// Picard iteration g <- mu (1 + S g) from g = 0 until the relative update drops below tol.
// Non-convergence is reported through `converged` and `diagnosis`.
BeltramiSolution solve_beltrami(const BeltramiProblem& problem, const TransformPlan& plan, double tol = 1e-12,
                                int max_iter = 500);

// Clamps |mu| to 1 - 1/m, keeping the argument.
std::vector<cplx> truncate_mu(std::span<const cplx> mu, int m);
ComplexField truncate_mu(const ComplexField& mu, int m);
BoxField truncate_mu(const BoxField& mu, int m);

// Tensor Lagrange interpolation of a box field at z with `order` points per axis (even).
cplx interpolate(const BoxField& field, const TransformPlan& plan, cplx z, int order = 6);
// Samples a box field at the nodes of a polar grid.
ComplexField box_to_grid(const BoxField& field, const TransformPlan& plan, const DiskGrid& grid, int order = 6);
// Carries a polar-grid field to the box by cubic Lagrange interpolation in (r, theta);
// zero outside the grid's annulus. Radial stencils stay inside the grid, so a field with
// a jump at the domain edge is not smeared across it.
BoxField grid_to_box(const ComplexField& field, const DiskGrid& grid, const TransformPlan& plan);

// The principal solution sampled on a polar grid.
MappingField beltrami_mapping(const BeltramiSolution& solution, const TransformPlan& plan,
                              std::shared_ptr<const DiskGrid> grid);

}  // namespace pconf
