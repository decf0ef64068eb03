#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pconf {

using cplx = std::complex<double>;

enum class DomainKind { disk, annulus };

struct Domain {
  DomainKind kind = DomainKind::disk;
  double rho_inner = 0.0;

  static Domain disk() { return {}; }
  static Domain annulus(double rho_inner) { return {DomainKind::annulus, rho_inner}; }

  double inner_radius() const { return kind == DomainKind::disk ? 0.0 : rho_inner; }
  double area() const;
  std::string describe() const;

  friend bool operator==(const Domain&, const Domain&) = default;
};

// Two fields are compatible when they were sampled on grids with equal tags.
struct GridTag {
  Domain domain;
  int n_r = 0;
  int n_theta = 0;

  friend bool operator==(const GridTag&, const GridTag&) = default;
};

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <class T>
struct Field {
  GridTag tag;
  std::vector<T> values;

  std::size_t size() const { return values.size(); }
  T& operator[](std::size_t k) { return values[k]; }
  const T& operator[](std::size_t k) const { return values[k]; }
};

using ComplexField = Field<cplx>;
using RealField = Field<double>;

namespace detail {
class FftPlan;
}

// Cell-centred polar tensor grid on the unit disk or on an annulus rho_inner < |z| < 1.
// Storage is ring-major: index(i, j) = i * n_theta + j, i radial, j angular.
class DiskGrid {
 public:
  DiskGrid(Domain domain, int n_r, int n_theta);

  const Domain& domain() const { return tag_.domain; }
  const GridTag& tag() const { return tag_; }
  int n_r() const { return tag_.n_r; }
  int n_theta() const { return tag_.n_theta; }
  std::size_t size() const { return static_cast<std::size_t>(n_r()) * n_theta(); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_theta() + j; }

  // Rings whose nodes a solve may move. The two outermost rings are pinned to the
  // boundary data, and on the annulus so are the two innermost ones. The energy's
  // end rings reuse their only radial edge for both the forward and the backward
  // rule, which weights that edge half again too much; with both of its rings
  // pinned the excess is a constant, otherwise the minimizer bends into it and
  // picks up an O(dr) boundary layer.
  static constexpr int kPinnedRings = 2;
  int first_free_ring() const { return domain().kind == DomainKind::annulus ? kPinnedRings : 0; }
  int last_free_ring() const { return n_r() - 1 - kPinnedRings; }
  bool is_pinned(std::size_t k) const {
    const int i = static_cast<int>(k / n_theta());
    return i < first_free_ring() || i > last_free_ring();
  }

  double r_min() const { return tag_.domain.inner_radius(); }
  double r_max() const { return 1.0; }
  double dr() const { return dr_; }
  double dtheta() const { return dtheta_; }
  double radius(int i) const { return radii_[i]; }
  double theta(int j) const { return thetas_[j]; }
  // e^{i theta_j}
  cplx phase(int j) const { return phases_[j]; }

  std::span<const double> radii() const { return radii_; }
  std::span<const double> thetas() const { return thetas_; }
  std::span<const cplx> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  ComplexField complex_field(cplx fill = 0.0) const;
  RealField real_field(double fill = 0.0) const;

  template <class Fn>
  ComplexField sample(Fn&& fn) const {
    ComplexField out = complex_field();
    for (std::size_t k = 0; k < size(); ++k) out.values[k] = fn(nodes_[k]);
    return out;
  }

  template <class T>
  void require(const Field<T>& field) const {
    if (!(field.tag == tag_) || field.values.size() != size())
      throw GridMismatch("field was sampled on a different grid than " + describe());
  }

  std::string describe() const;

  // Batched length-n_theta transform over all rings, used by the angular derivative.
  const detail::FftPlan& angular_fft() const { return *angular_fft_; }

 private:
  GridTag tag_;
  double dr_ = 0.0;
  double dtheta_ = 0.0;
  std::vector<double> radii_;
  std::vector<double> thetas_;
  std::vector<cplx> phases_;
  std::vector<cplx> nodes_;
  std::vector<double> weights_;
  std::shared_ptr<const detail::FftPlan> angular_fft_;
};

DiskGrid build_grid(Domain domain, int n_r, int n_theta);

// Deterministic pairwise (cascade) summation; the reduction tree depends only on the length.
double pairwise_sum(std::span<const double> xs);
cplx pairwise_sum(std::span<const cplx> xs);

cplx integrate(const ComplexField& field, const DiskGrid& grid);
double integrate(const RealField& field, const DiskGrid& grid);

struct WirtingerPair {
  ComplexField dz;
  ComplexField dzbar;
};

// Radial difference rules. `centered` is the three-point second-order stencil with
// one-sided three-point rows at the first and last ring. `forward` and `backward` are
// the compact two-point differences; at the ring where one has no neighbour it falls
// back to the other, except that `backward` on the first ring of the disk reaches
// through the origin to the antipodal node.
enum class RadialStencil { centered, forward, backward };

WirtingerPair wirtinger(const ComplexField& field, const DiskGrid& grid,
                        RadialStencil stencil = RadialStencil::centered);

// All three rules at once, sharing one angular derivative.
struct WirtingerSet {
  WirtingerPair centered;
  WirtingerPair forward;
  WirtingerPair backward;
};
WirtingerSet wirtinger_set(const ComplexField& field, const DiskGrid& grid);

// Raw polar derivatives. In theta the derivative is spectral (exact on every mode below
// Nyquist), in r it is one of the stencils above, so affine maps a + bz + c conj(z) are
// differentiated exactly by all three.
void radial_derivative(std::span<const cplx> f, const DiskGrid& grid, std::span<cplx> out,
                       RadialStencil stencil = RadialStencil::centered);
void angular_derivative(std::span<const cplx> f, const DiskGrid& grid, std::span<cplx> out);

// Adjoint of f -> (A f, B f) where A f = f_z and B f = f_zbar, with respect to the
// Euclidean inner product on nodal values: returns A^H alpha + B^H beta.
void wirtinger_adjoint(std::span<const cplx> alpha, std::span<const cplx> beta, const DiskGrid& grid,
                       std::span<cplx> out, RadialStencil stencil = RadialStencil::centered);

// Cubic Lagrange interpolation in (r, theta). The radial stencil is clamped to the grid,
// so points beyond the first or last ring are extrapolated from the four nearest rings.
cplx interpolate_polar(std::span<const cplx> values, const DiskGrid& grid, cplx z);

// Rows: r, theta, re, im (ring-major).
void write_field_csv(std::ostream& os, const ComplexField& field, const DiskGrid& grid);
ComplexField read_field_csv(std::istream& is, const DiskGrid& grid);

}  // namespace pconf
