#include "pconf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fft.hpp"
#include "stencil.hpp"

namespace pconf {

namespace {

constexpr std::size_t kPairwiseBlock = 16;

template <class T>
T pairwise_impl(const T* xs, std::size_t n) {
  if (n <= kPairwiseBlock) {
    T acc{};
    for (std::size_t k = 0; k < n; ++k) acc += xs[k];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_impl(xs, half) + pairwise_impl(xs + half, n - half);
}

}  // namespace

double Domain::area() const {
  const double ri = inner_radius();
  return std::numbers::pi * (1.0 - ri * ri);
}

std::string Domain::describe() const {
  if (kind == DomainKind::disk) return "disk";
  std::ostringstream os;
  os << "annulus(" << rho_inner << ")";
  return os.str();
}

DiskGrid::DiskGrid(Domain domain, int n_r, int n_theta) {
  if (n_r < 4) throw std::invalid_argument("n_r must be at least 4, got " + std::to_string(n_r));
  if (n_theta < 8) throw std::invalid_argument("n_theta must be at least 8, got " + std::to_string(n_theta));
  if (n_theta % 2 != 0) throw std::invalid_argument("n_theta must be even, got " + std::to_string(n_theta));
  if (domain.kind == DomainKind::annulus && !(domain.rho_inner > 0.0 && domain.rho_inner < 1.0))
    throw std::invalid_argument("annulus inner radius must lie in (0,1)");
  if (domain.kind == DomainKind::disk) domain.rho_inner = 0.0;

  tag_ = GridTag{domain, n_r, n_theta};
  const double r0 = domain.inner_radius();
  dr_ = (1.0 - r0) / n_r;
  dtheta_ = 2.0 * std::numbers::pi / n_theta;

  radii_.resize(n_r);
  for (int i = 0; i < n_r; ++i) radii_[i] = r0 + (i + 0.5) * dr_;
  thetas_.resize(n_theta);
  phases_.resize(n_theta);
  for (int j = 0; j < n_theta; ++j) {
    thetas_[j] = j * dtheta_;
    phases_[j] = std::polar(1.0, thetas_[j]);
  }
  nodes_.resize(size());
  weights_.resize(size());
  for (int i = 0; i < n_r; ++i) {
    for (int j = 0; j < n_theta; ++j) {
      nodes_[index(i, j)] = radii_[i] * phases_[j];
      weights_[index(i, j)] = radii_[i] * dr_ * dtheta_;
    }
  }
  angular_fft_ = std::make_shared<const detail::FftPlan>(detail::FftPlan::Kind::batch_1d, n_theta, n_r);
}

ComplexField DiskGrid::complex_field(cplx fill) const { return {tag_, std::vector<cplx>(size(), fill)}; }

RealField DiskGrid::real_field(double fill) const { return {tag_, std::vector<double>(size(), fill)}; }

std::string DiskGrid::describe() const {
  std::ostringstream os;
  os << domain().describe() << " " << n_r() << "x" << n_theta();
  return os.str();
}

DiskGrid build_grid(Domain domain, int n_r, int n_theta) { return DiskGrid(domain, n_r, n_theta); }

double pairwise_sum(std::span<const double> xs) { return pairwise_impl(xs.data(), xs.size()); }

cplx pairwise_sum(std::span<const cplx> xs) { return pairwise_impl(xs.data(), xs.size()); }

cplx integrate(const ComplexField& field, const DiskGrid& grid) {
  grid.require(field);
  std::vector<cplx> terms(grid.size());
  const auto w = grid.weights();
  for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = field.values[k] * w[k];
  return pairwise_sum(std::span<const cplx>(terms));
}

double integrate(const RealField& field, const DiskGrid& grid) {
  grid.require(field);
  std::vector<double> terms(grid.size());
  const auto w = grid.weights();
  for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = field.values[k] * w[k];
  return pairwise_sum(std::span<const double>(terms));
}

namespace detail {

RadialRow radial_row(const DiskGrid& grid, int i, RadialStencil stencil) {
  const int nr = grid.n_r();
  const bool disk = grid.domain().kind == DomainKind::disk;
  switch (stencil) {
    case RadialStencil::centered:
      if (i == 0) return {{{{0, false, -1.5}, {1, false, 2.0}, {2, false, -0.5}}}, 3};
      if (i == nr - 1) return {{{{nr - 1, false, 1.5}, {nr - 2, false, -2.0}, {nr - 3, false, 0.5}}}, 3};
      return {{{{i + 1, false, 0.5}, {i - 1, false, -0.5}, {}}}, 2};
    case RadialStencil::forward:
      if (i == nr - 1) return {{{{i, false, 1.0}, {i - 1, false, -1.0}, {}}}, 2};
      return {{{{i + 1, false, 1.0}, {i, false, -1.0}, {}}}, 2};
    case RadialStencil::backward:
      if (i == 0 && disk) return {{{{0, false, 1.0}, {0, true, -1.0}, {}}}, 2};
      if (i == 0) return {{{{1, false, 1.0}, {0, false, -1.0}, {}}}, 2};
      return {{{{i, false, 1.0}, {i - 1, false, -1.0}, {}}}, 2};
  }
  throw std::logic_error("unknown radial stencil");
}

}  // namespace detail

void radial_derivative(std::span<const cplx> f, const DiskGrid& grid, std::span<cplx> out, RadialStencil stencil) {
  const int nr = grid.n_r();
  const int nt = grid.n_theta();
  const double inv = 1.0 / grid.dr();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < nr; ++i) {
    const auto row = detail::radial_row(grid, i, stencil);
    for (int j = 0; j < nt; ++j) {
      cplx d = 0.0;
      for (int e = 0; e < row.size; ++e) {
        const auto& en = row.entries[e];
        d += en.coef * f[grid.index(en.ring, en.antipodal ? (j + nt / 2) % nt : j)];
      }
      out[grid.index(i, j)] = d * inv;
    }
  }
}

void angular_derivative(std::span<const cplx> f, const DiskGrid& grid, std::span<cplx> out) {
  // Spectral in theta, with the Nyquist mode dropped so the operator stays real and
  // skew-symmetric. A short centred stencil would annihilate (-1)^j times any smooth
  // field, and the energy then has cheap grid-scale directions that minimizers find.
  const int nt = grid.n_theta();
  const cplx I(0.0, 1.0);
  std::copy(f.begin(), f.end(), out.begin());
  grid.angular_fft().forward(out);
  const double scale = 1.0 / nt;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < grid.n_r(); ++i) {
    cplx* row = out.data() + grid.index(i, 0);
    for (int m = 0; m < nt; ++m) {
      const int k = m <= nt / 2 ? m : m - nt;
      row[m] = (2 * m == nt) ? cplx(0.0) : I * (k * scale) * row[m];
    }
  }
  grid.angular_fft().backward(out);
}

namespace {

WirtingerPair combine(const DiskGrid& grid, std::span<const cplx> fr, std::span<const cplx> ft) {
  WirtingerPair out{grid.complex_field(), grid.complex_field()};
  const cplx I(0.0, 1.0);
  const int nt = grid.n_theta();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < grid.n_r(); ++i) {
    const double inv_r = 1.0 / grid.radius(i);
    for (int j = 0; j < nt; ++j) {
      const std::size_t k = grid.index(i, j);
      const cplx e = grid.phase(j);
      out.dz.values[k] = 0.5 * std::conj(e) * (fr[k] - I * inv_r * ft[k]);
      out.dzbar.values[k] = 0.5 * e * (fr[k] + I * inv_r * ft[k]);
    }
  }
  return out;
}

}  // namespace

WirtingerPair wirtinger(const ComplexField& field, const DiskGrid& grid, RadialStencil stencil) {
  grid.require(field);
  std::vector<cplx> fr(grid.size()), ft(grid.size());
  radial_derivative(field.values, grid, fr, stencil);
  angular_derivative(field.values, grid, ft);
  return combine(grid, fr, ft);
}

WirtingerSet wirtinger_set(const ComplexField& field, const DiskGrid& grid) {
  grid.require(field);
  std::vector<cplx> fr(grid.size()), ft(grid.size());
  angular_derivative(field.values, grid, ft);
  radial_derivative(field.values, grid, fr, RadialStencil::centered);
  WirtingerPair c = combine(grid, fr, ft);
  radial_derivative(field.values, grid, fr, RadialStencil::forward);
  WirtingerPair f = combine(grid, fr, ft);
  radial_derivative(field.values, grid, fr, RadialStencil::backward);
  WirtingerPair b = combine(grid, fr, ft);
  return {std::move(c), std::move(f), std::move(b)};
}

void wirtinger_adjoint(std::span<const cplx> alpha, std::span<const cplx> beta, const DiskGrid& grid,
                       std::span<cplx> out, RadialStencil stencil) {
  // A = (1/2) e^{-i theta} (D_r - (i/r) D_theta), B = (1/2) e^{i theta} (D_r + (i/r) D_theta).
  // A^H alpha + B^H beta = D_r^T x - D_theta y, using D_theta^T = -D_theta, with
  //   x = (e^{i theta} alpha + e^{-i theta} beta) / 2,  y = (i / 2r)(e^{i theta} alpha - e^{-i theta} beta).
  const int nr = grid.n_r();
  const int nt = grid.n_theta();
  const std::size_t n = grid.size();
  std::vector<cplx> x(n), y(n), dy(n);
  const cplx I(0.0, 1.0);
  for (int i = 0; i < nr; ++i) {
    const double half_inv_r = 0.5 / grid.radius(i);
    for (int j = 0; j < nt; ++j) {
      const std::size_t k = grid.index(i, j);
      const cplx ea = grid.phase(j) * alpha[k];
      const cplx eb = std::conj(grid.phase(j)) * beta[k];
      x[k] = 0.5 * (ea + eb);
      y[k] = I * half_inv_r * (ea - eb);
    }
  }
  angular_derivative(y, grid, dy);

  for (std::size_t k = 0; k < n; ++k) out[k] = -dy[k];
  // Transposed scatter of the radial rows. Serial: rows overlap in their columns.
  const double inv = 1.0 / grid.dr();
  for (int i = 0; i < nr; ++i) {
    const auto row = detail::radial_row(grid, i, stencil);
    for (int e = 0; e < row.size; ++e) {
      const auto& en = row.entries[e];
      const double c = en.coef * inv;
      for (int j = 0; j < nt; ++j) out[grid.index(en.ring, en.antipodal ? (j + nt / 2) % nt : j)] += c * x[grid.index(i, j)];
    }
  }
}

cplx interpolate_polar(std::span<const cplx> values, const DiskGrid& grid, cplx z) {
  if (values.size() != grid.size()) throw GridMismatch("field size does not match " + grid.describe());
  const int nr = grid.n_r();
  const int nt = grid.n_theta();
  double theta = std::arg(z);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  const double s = (std::abs(z) - grid.radius(0)) / grid.dr();
  const int i0 = std::clamp(static_cast<int>(std::floor(s)) - 1, 0, nr - 4);
  const double t = theta / grid.dtheta();
  const int j0 = static_cast<int>(std::floor(t)) - 1;
  double wr[4], wt[4];
  for (int a = 0; a < 4; ++a) {
    wr[a] = 1.0;
    wt[a] = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b == a) continue;
      wr[a] *= (s - i0 - b) / (a - b);
      wt[a] *= (t - j0 - b) / (a - b);
    }
  }
  cplx acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    cplx ring = 0.0;
    for (int b = 0; b < 4; ++b) ring += wt[b] * values[grid.index(i0 + a, ((j0 + b) % nt + nt) % nt)];
    acc += wr[a] * ring;
  }
  return acc;
}

void write_field_csv(std::ostream& os, const ComplexField& field, const DiskGrid& grid) {
  grid.require(field);
  os << "r,theta,re,im\n" << std::setprecision(17);
  for (int i = 0; i < grid.n_r(); ++i)
    for (int j = 0; j < grid.n_theta(); ++j) {
      const cplx v = field.values[grid.index(i, j)];
      os << grid.radius(i) << ',' << grid.theta(j) << ',' << v.real() << ',' << v.imag() << '\n';
    }
}

ComplexField read_field_csv(std::istream& is, const DiskGrid& grid) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("r,theta,re,im", 0) != 0)
    throw std::runtime_error("field CSV must start with header r,theta,re,im");
  ComplexField out = grid.complex_field();
  std::size_t k = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (k >= grid.size()) throw GridMismatch("field CSV has more rows than " + grid.describe());
    std::istringstream row(line);
    double r = 0, t = 0, re = 0, im = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    row >> r >> c1 >> t >> c2 >> re >> c3 >> im;
    if (!row || c1 != ',' || c2 != ',' || c3 != ',') throw std::runtime_error("malformed field CSV row: " + line);
    const int i = static_cast<int>(k) / grid.n_theta();
    const int j = static_cast<int>(k) % grid.n_theta();
    if (std::abs(r - grid.radius(i)) > 1e-9 || std::abs(t - grid.theta(j)) > 1e-9)
      throw GridMismatch("field CSV node does not match " + grid.describe());
    out.values[k++] = {re, im};
  }
  if (k != grid.size()) throw GridMismatch("field CSV has fewer rows than " + grid.describe());
  return out;
}

}  // namespace pconf
