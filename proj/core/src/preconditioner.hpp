#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "pconf/grid.hpp"

namespace pconf::detail {

class FftPlan;

// Hessian of a ring-weighted Dirichlet energy sum_k s_i w_k (|f_z|^2 + |f_zbar|^2) under
// the same pair of radial rules as the distortion energy,
//   H = (D_+^T S W D_+ + D_-^T S W D_-) / 2 + D_theta^T (S W / r^2) D_theta,
// restricted to the free rings (pinned values held at zero). With s_i the ring average
// of the distortion energy's local curvature, H tracks how strongly K^p weights each
// ring, which varies by orders of magnitude for large p or strongly stretched maps.
// Solved exactly: FFT in theta, banded Cholesky in r.
class DirichletPreconditioner {
 public:
  // ring_scale holds s_i for every ring; empty means s = 1.
  explicit DirichletPreconditioner(const DiskGrid& grid, std::span<const double> ring_scale = {});
  ~DirichletPreconditioner();

  // out = H^{-1} g on free nodes, 0 on pinned nodes. Pinned entries of g are ignored.
  void solve(std::span<const cplx> g, std::span<cplx> out) const;
  // out = H u with u read on free nodes only.
  void apply(std::span<const cplx> u, std::span<cplx> out) const;

 private:
  static constexpr int kBand = 2;

  const DiskGrid* grid_;
  int first_;
  int count_;
  // Radial part restricted to the free rings, banded: radial_[parity][q][b] = R(q, q - b).
  // On the disk the backward rule reaches the antipodal node, which carries (-1)^m in
  // angular mode m, so even and odd modes see different radial matrices.
  std::array<std::vector<std::array<double, kBand + 1>>, 2> radial_;
  std::vector<double> scale_;           // s_i per ring
  std::vector<double> angular_weight_;  // s_i w_i / r_i^2 per free ring
  std::vector<double> symbol_;          // m^2 per angular mode, 0 at Nyquist
  // Cholesky factors per mode, same banded layout.
  std::vector<std::array<double, kBand + 1>> factors_;
  std::unique_ptr<FftPlan> fft_;
};

}  // namespace pconf::detail
