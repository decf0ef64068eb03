#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>

#include "pconf/grid.hpp"

namespace pconf {

// Truncated Fourier series f0(e^{i theta}) = sum_{n=-N}^{N} c_n e^{i n theta}.
class BoundaryTrace {
 public:
  BoundaryTrace() : coeffs_(1, 0.0) {}
  explicit BoundaryTrace(std::map<int, cplx> coefficients);
  // Least-squares trigonometric fit of order N to equispaced samples (N < samples/2).
  static BoundaryTrace from_samples(std::span<const cplx> samples, int order);
  static BoundaryTrace from_function(const std::function<cplx(double)>& fn, int order, int samples = 0);

  int order() const { return static_cast<int>(coeffs_.size() / 2); }
  cplx coeff(int n) const;
  std::span<const cplx> fourier_coeffs() const { return coeffs_; }

  cplx operator()(double theta) const;
  cplx derivative(double theta) const;

  int winding_number(int samples = 2048) const;
  // max over samples of | |f0| - 1 |.
  double modulus_defect(int samples = 2048) const;

 private:
  std::vector<cplx> coeffs_;  // c_{-N} .. c_N
};

BoundaryTrace identity_trace();
BoundaryTrace rotation_trace(double c);
// e^{i(theta + eps sin theta)}, expanded through Jacobi-Anger and truncated where |J_k(eps)| < 1e-17.
BoundaryTrace sinusoidal_trace(double eps);

// Boundary conditions for a solve. The annulus needs an inner trace as well.
// When `exact` is set it is an exact extension of the data and supplies the
// values of the pinned rings; otherwise the harmonic extension does.
struct BoundaryData {
  BoundaryTrace outer = identity_trace();
  std::optional<BoundaryTrace> inner;
  std::function<cplx(cplx)> exact;
};

BoundaryData boundary_from_trace(BoundaryTrace outer);

class MappingField {
 public:
  MappingField(std::shared_ptr<const DiskGrid> grid, ComplexField f);

  template <class Fn>
  static MappingField sample(std::shared_ptr<const DiskGrid> grid, Fn&& fn) {
    ComplexField f = grid->sample(std::forward<Fn>(fn));
    return MappingField(std::move(grid), std::move(f));
  }

  const DiskGrid& grid() const { return *grid_; }
  const std::shared_ptr<const DiskGrid>& grid_ptr() const { return grid_; }
  const ComplexField& f() const { return f_; }
  const ComplexField& fz() const { return fz_; }
  const ComplexField& fzbar() const { return fzbar_; }
  // Derivatives under the compact forward and backward radial rules, which the energy uses.
  const WirtingerPair& forward() const { return forward_; }
  const WirtingerPair& backward() const { return backward_; }

  std::optional<BoundaryTrace> boundary;

  void assign(std::span<const cplx> values);

 private:
  void refresh();

  std::shared_ptr<const DiskGrid> grid_;
  ComplexField f_;
  ComplexField fz_;
  ComplexField fzbar_;
  WirtingerPair forward_;
  WirtingerPair backward_;
};

struct DistortionBundle {
  ComplexField mu;
  RealField K;
  RealField J;
  std::size_t degenerate_nodes = 0;        // |f_z| <= eps_div, mu set to 0
  std::size_t orientation_violations = 0;  // J < -eps_J
};

// Thresholds of the degenerate-node conventions, scaled by max(|f_z| + |f_zbar|).
struct DegeneracyThresholds {
  double eps_div;
  double eps_J;
};
DegeneracyThresholds degeneracy_thresholds(const MappingField& m);

RealField jacobian(const MappingField& m);
ComplexField beltrami(const MappingField& m);
DistortionBundle distortion(const MappingField& m);

// Rows: r, theta, re_mu, im_mu, K, J.
void write_distortion_csv(std::ostream& os, const DistortionBundle& bundle, const DiskGrid& grid);

}  // namespace pconf
