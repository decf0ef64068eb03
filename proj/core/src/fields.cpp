#include "pconf/fields.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace pconf {

BoundaryTrace::BoundaryTrace(std::map<int, cplx> coefficients) {
  int order = 0;
  for (const auto& [n, c] : coefficients) order = std::max(order, std::abs(n));
  coeffs_.assign(2 * order + 1, 0.0);
  for (const auto& [n, c] : coefficients) coeffs_[n + order] += c;
}

BoundaryTrace BoundaryTrace::from_samples(std::span<const cplx> samples, int order) {
  const int m = static_cast<int>(samples.size());
  if (order < 0 || 2 * order >= m) throw std::invalid_argument("trace order must be below half the sample count");
  std::map<int, cplx> coeffs;
  for (int n = -order; n <= order; ++n) {
    cplx acc = 0.0;
    for (int s = 0; s < m; ++s) acc += samples[s] * std::polar(1.0, -2.0 * std::numbers::pi * n * s / m);
    coeffs[n] = acc / static_cast<double>(m);
  }
  return BoundaryTrace(std::move(coeffs));
}

BoundaryTrace BoundaryTrace::from_function(const std::function<cplx(double)>& fn, int order, int samples) {
  if (samples <= 0) samples = std::max(64, 4 * order + 4);
  std::vector<cplx> xs(samples);
  for (int s = 0; s < samples; ++s) xs[s] = fn(2.0 * std::numbers::pi * s / samples);
  return from_samples(xs, order);
}

cplx BoundaryTrace::coeff(int n) const {
  const int N = order();
  return std::abs(n) > N ? cplx(0.0) : coeffs_[n + N];
}

cplx BoundaryTrace::operator()(double theta) const {
  const int N = order();
  cplx acc = 0.0;
  for (int n = -N; n <= N; ++n) acc += coeffs_[n + N] * std::polar(1.0, n * theta);
  return acc;
}

cplx BoundaryTrace::derivative(double theta) const {
  const int N = order();
  cplx acc = 0.0;
  for (int n = -N; n <= N; ++n) acc += cplx(0.0, n) * coeffs_[n + N] * std::polar(1.0, n * theta);
  return acc;
}

int BoundaryTrace::winding_number(int samples) const {
  double total = 0.0;
  cplx prev = (*this)(0.0);
  for (int s = 1; s <= samples; ++s) {
    const cplx cur = (*this)(2.0 * std::numbers::pi * s / samples);
    if (std::abs(cur) == 0.0 || std::abs(prev) == 0.0) throw std::invalid_argument("boundary trace passes through 0");
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

double BoundaryTrace::modulus_defect(int samples) const {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s)
    worst = std::max(worst, std::abs(std::abs((*this)(2.0 * std::numbers::pi * s / samples)) - 1.0));
  return worst;
}

BoundaryTrace identity_trace() { return BoundaryTrace({{1, 1.0}}); }

BoundaryTrace rotation_trace(double c) { return BoundaryTrace({{1, std::polar(1.0, c)}}); }

BoundaryTrace sinusoidal_trace(double eps) {
  std::map<int, cplx> coeffs;
  coeffs[1] = std::cyl_bessel_j(0.0, std::abs(eps));
  for (int k = 1; k < 64; ++k) {
    const double jk = std::cyl_bessel_j(static_cast<double>(k), std::abs(eps));
    if (std::abs(jk) < 1e-17) break;
    // J_{-k}(x) = (-1)^k J_k(x) and J_k(-x) = (-1)^k J_k(x).
    const double sign_eps = (eps < 0 && k % 2 == 1) ? -1.0 : 1.0;
    const double sign_neg = (k % 2 == 1) ? -1.0 : 1.0;
    coeffs[1 + k] = sign_eps * jk;
    coeffs[1 - k] = sign_eps * sign_neg * jk;
  }
  return BoundaryTrace(std::move(coeffs));
}

BoundaryData boundary_from_trace(BoundaryTrace outer) {
  BoundaryData data;
  data.outer = std::move(outer);
  return data;
}

MappingField::MappingField(std::shared_ptr<const DiskGrid> grid, ComplexField f)
    : grid_(std::move(grid)), f_(std::move(f)) {
  if (!grid_) throw std::invalid_argument("mapping field needs a grid");
  grid_->require(f_);
  refresh();
}

void MappingField::assign(std::span<const cplx> values) {
  if (values.size() != f_.values.size()) throw GridMismatch("assigned values do not match the grid size");
  std::copy(values.begin(), values.end(), f_.values.begin());
  refresh();
}

void MappingField::refresh() {
  auto d = wirtinger_set(f_, *grid_);
  fz_ = std::move(d.centered.dz);
  fzbar_ = std::move(d.centered.dzbar);
  forward_ = std::move(d.forward);
  backward_ = std::move(d.backward);
}

DegeneracyThresholds degeneracy_thresholds(const MappingField& m) {
  double scale = 0.0;
  for (std::size_t k = 0; k < m.f().size(); ++k)
    scale = std::max(scale, std::abs(m.fz()[k]) + std::abs(m.fzbar()[k]));
  if (scale == 0.0) scale = 1.0;
  return {1e-14 * scale, 1e-12 * scale * scale};
}

RealField jacobian(const MappingField& m) {
  RealField J = m.grid().real_field();
  for (std::size_t k = 0; k < J.size(); ++k) J[k] = std::norm(m.fz()[k]) - std::norm(m.fzbar()[k]);
  return J;
}

ComplexField beltrami(const MappingField& m) {
  const auto th = degeneracy_thresholds(m);
  ComplexField mu = m.grid().complex_field();
  for (std::size_t k = 0; k < mu.size(); ++k)
    mu[k] = std::abs(m.fz()[k]) > th.eps_div ? m.fzbar()[k] / m.fz()[k] : cplx(0.0);
  return mu;
}

DistortionBundle distortion(const MappingField& m) {
  const auto th = degeneracy_thresholds(m);
  DistortionBundle b{m.grid().complex_field(), m.grid().real_field(1.0), m.grid().real_field(), 0, 0};
  for (std::size_t k = 0; k < b.J.size(); ++k) {
    const double u = std::norm(m.fz()[k]);
    const double v = std::norm(m.fzbar()[k]);
    const double J = u - v;
    b.J[k] = J;
    if (std::abs(m.fz()[k]) > th.eps_div) {
      b.mu[k] = m.fzbar()[k] / m.fz()[k];
    } else {
      ++b.degenerate_nodes;
    }
    if (J > th.eps_J) {
      b.K[k] = (u + v) / J;
    } else if (J < -th.eps_J) {
      ++b.orientation_violations;
    }
  }
  return b;
}

void write_distortion_csv(std::ostream& os, const DistortionBundle& bundle, const DiskGrid& grid) {
  grid.require(bundle.mu);
  os << "r,theta,re_mu,im_mu,K,J\n" << std::setprecision(17);
  for (int i = 0; i < grid.n_r(); ++i)
    for (int j = 0; j < grid.n_theta(); ++j) {
      const std::size_t k = grid.index(i, j);
      os << grid.radius(i) << ',' << grid.theta(j) << ',' << bundle.mu[k].real() << ',' << bundle.mu[k].imag() << ','
         << bundle.K[k] << ',' << bundle.J[k] << '\n';
    }
}

}  // namespace pconf
