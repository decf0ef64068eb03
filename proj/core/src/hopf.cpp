#include "pconf/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace pconf {

namespace {

double masked_l1(const ComplexField& f, const DiskGrid& grid, const RealField& mask) {
  std::vector<double> terms(grid.size());
  const auto w = grid.weights();
  for (std::size_t k = 0; k < terms.size(); ++k) terms[k] = mask[k] * w[k] * std::abs(f[k]);
  return pairwise_sum(std::span<const double>(terms));
}

}  // namespace

RealField hopf_mask(const DiskGrid& grid) {
  RealField mask = grid.real_field(1.0);
  const int nt = grid.n_theta();
  auto drop = [&](int i) {
    for (int j = 0; j < nt; ++j) mask[grid.index(i, j)] = 0.0;
  };
  drop(0);
  drop(grid.n_r() - 1);
  if (grid.domain().kind == DomainKind::disk) drop(1);
  return mask;
}

double holomorphy_residual(const ComplexField& field, const DiskGrid& grid) {
  grid.require(field);
  const RealField mask = hopf_mask(grid);
  const double norm = masked_l1(field, grid, mask);
  if (norm == 0.0) return 0.0;
  const auto d = wirtinger(field, grid);
  return masked_l1(d.dzbar, grid, mask) * (grid.r_max() - grid.r_min()) / norm;
}

HopfField hopf_differential(const MappingField& h, double p) {
  if (p < 1.0) throw std::invalid_argument("energy exponent must be >= 1");
  const auto b = distortion(h);
  const auto th = degeneracy_thresholds(h);
  HopfField out;
  out.p = p;
  out.phi = h.grid().complex_field();
  // Phi is |h_wbar| / |h_w| times this; below round-off of it, Phi is zero.
  ComplexField scale = h.grid().complex_field();
  for (std::size_t k = 0; k < out.phi.size(); ++k) {
    if (!(b.J[k] > th.eps_J)) {
      ++out.degenerate_nodes;
      continue;
    }
    const double Kp = std::pow(b.K[k], p - 1.0);
    out.phi[k] = Kp * h.fz()[k] * std::conj(h.fzbar()[k]);
    scale[k] = Kp * std::norm(h.fz()[k]);
  }
  const RealField mask = hopf_mask(h.grid());
  if (masked_l1(out.phi, h.grid(), mask) > 1e-12 * masked_l1(scale, h.grid(), mask))
    out.holo_residual = holomorphy_residual(out.phi, h.grid());
  return out;
}

ComplexField inverse_hopf_at_image(const MappingField& f, double p) {
  const auto b = distortion(f);
  const auto th = degeneracy_thresholds(f);
  ComplexField phi = f.grid().complex_field();
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double J = b.J[k];
    if (!(J > th.eps_J)) continue;
    phi[k] = -std::pow(b.K[k], p - 1.0) * std::conj(f.fz()[k] * f.fzbar()[k]) / (J * J);
  }
  return phi;
}

double relative_l1_error(const ComplexField& phi, const DiskGrid& grid, const std::function<cplx(cplx)>& expected) {
  grid.require(phi);
  const RealField mask = hopf_mask(grid);
  const auto w = grid.weights();
  const auto nodes = grid.nodes();
  std::vector<double> num(grid.size()), den(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const cplx e = expected(nodes[k]);
    num[k] = mask[k] * w[k] * std::abs(phi[k] - e);
    den[k] = mask[k] * w[k] * std::abs(e);
  }
  return pairwise_sum(std::span<const double>(num)) / pairwise_sum(std::span<const double>(den));
}

double image_relative_l1_error(const ComplexField& phi_at_image, const MappingField& f,
                               const std::function<cplx(cplx)>& expected) {
  const DiskGrid& grid = f.grid();
  grid.require(phi_at_image);
  const RealField mask = hopf_mask(grid);
  const RealField J = jacobian(f);
  const auto w = grid.weights();
  std::vector<double> num(grid.size()), den(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const cplx e = expected(f.f()[k]);
    const double dw = mask[k] * w[k] * std::max(J[k], 0.0);
    num[k] = dw * std::abs(phi_at_image[k] - e);
    den[k] = dw * std::abs(e);
  }
  return pairwise_sum(std::span<const double>(num)) / pairwise_sum(std::span<const double>(den));
}

double profile_a(double p, double s) {
  const double l = std::log1p(s);
  return p * std::exp((p - 1.0) / p * l) * std::sqrt(std::expm1(2.0 * l / p));
}

double profile_a_prime(double p, double s) {
  if (s <= 0.0) return std::numeric_limits<double>::infinity();
  // In x = (s+1)^{1/p}: a_p'(s) = (p x - (p-1)/x) / sqrt(x^2 - 1).
  const double l = std::log1p(s);
  const double x = std::exp(l / p);
  return (p * x - (p - 1.0) / x) / std::sqrt(std::expm1(2.0 * l / p));
}

double profile_b(double p, double s) {
  const double a = profile_a(p, s);
  return a * a;
}

double profile_b_prime(double p, double s) {
  return p * p * (2.0 * (s + 1.0) - 2.0 * (p - 1.0) / p * std::pow(s + 1.0, (p - 2.0) / p));
}

double ellipticity_floor(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("ellipticity floor needs p > 1");
  return p <= 2.0 ? p : 2.0 * std::sqrt(p - 1.0);
}

ProfileTables profile_tables(double p, double s_max, int n_samples) {
  if (!(p > 1.0)) throw std::invalid_argument("profile tables need p > 1");
  if (!(s_max > 0.0) || n_samples < 2) throw std::invalid_argument("profile tables need s_max > 0 and >= 2 samples");
  ProfileTables t;
  t.p = p;
  t.M_p = ellipticity_floor(p);
  t.k_p = 1.0 / t.M_p;
  t.s.reserve(n_samples);
  t.s.push_back(0.0);
  const double lo = std::log(s_max * 1e-12);
  const double hi = std::log(s_max);
  for (int k = 1; k < n_samples; ++k) {
    const double u = n_samples == 2 ? 1.0 : static_cast<double>(k - 1) / (n_samples - 2);
    t.s.push_back(k == n_samples - 1 ? s_max : std::exp(lo + u * (hi - lo)));
  }
  for (double s : t.s) {
    t.a.push_back(profile_a(p, s));
    t.a_prime.push_back(profile_a_prime(p, s));
    t.b.push_back(profile_b(p, s));
    t.b_prime.push_back(profile_b_prime(p, s));
  }
  return t;
}

TransformPlan potential_plan(int n_fft) { return TransformPlan::around_disk(n_fft, 0.95, 2.0); }

PotentialField reconstruct_potential(const MappingField& m, double p, const TransformPlan& plan, double fit_radius) {
  if (!(p > 1.0)) throw std::invalid_argument("potential needs p > 1");
  const DiskGrid& grid = m.grid();
  // The cut-off must be flat over the fitting region and gone well inside the central half box.
  constexpr double kCutoffRadius = 0.82;
  constexpr double kCutoffWidth = 0.02;
  if (!(fit_radius > grid.r_min() && fit_radius <= 0.7)) throw std::invalid_argument("fit radius must lie in (r_min, 0.7]");
  if (plan.box_size() < 4.0 * (kCutoffRadius + 6.0 * kCutoffWidth))
    throw std::invalid_argument("transform box too small for the potential cut-off");
  if (plan.spacing() > 0.5 * kCutoffWidth)
    throw std::invalid_argument("transform spacing does not resolve the potential cut-off (use n_fft >= 512)");

  const auto bundle = distortion(m);
  const auto th = degeneracy_thresholds(m);
  const std::size_t n = grid.size();
  ComplexField a = grid.complex_field();
  ComplexField b = grid.complex_field();
  for (std::size_t k = 0; k < n; ++k) {
    if (!(bundle.J[k] > th.eps_J)) continue;
    const double Kp = std::pow(bundle.K[k], p);
    const cplx mu = bundle.mu[k];
    a[k] = 2.0 * p * Kp * std::conj(mu) / (1.0 + std::norm(mu));
    b[k] = Kp - 1.0;
  }

  BoxField g = grid_to_box(b, grid, plan);
  for (int iy = 0; iy < plan.n_fft(); ++iy)
    for (int ix = 0; ix < plan.n_fft(); ++ix) {
      const double r = std::abs(plan.node(ix, iy));
      g[plan.index(ix, iy)] *= 0.5 * std::erfc((r - kCutoffRadius) / kCutoffWidth);
    }
  constexpr int kOrder = 8;
  const ComplexField F0 = box_to_grid(cauchy_transform(g, plan), plan, grid, kOrder);
  const ComplexField F0z = box_to_grid(beurling_transform(g, plan), plan, grid, kOrder);
  const ComplexField F0zbar = box_to_grid(g, plan, grid, kOrder);

  PotentialField out;
  out.region = grid.real_field();
  const int nt = grid.n_theta();
  const int first = grid.domain().kind == DomainKind::annulus ? 1 : 0;
  std::vector<int> rings;
  for (int i = first; i < grid.n_r() - 1 && grid.radius(i) <= fit_radius; ++i) rings.push_back(i);
  if (rings.size() < 2) throw std::invalid_argument("too few rings inside the fit radius");
  for (int i : rings)
    for (int j = 0; j < nt; ++j) out.region[grid.index(i, j)] = 1.0;

  // a - d/dz F0 is holomorphic on the fitting region when m is critical. Mode n of a
  // holomorphic (Laurent) series behaves as d_n r^n on every ring; fit d_n by least squares.
  const int n_max = nt / 2 - 1;
  const int n_min = grid.domain().kind == DomainKind::disk ? 0 : -n_max;
  const int modes = n_max - n_min + 1;
  std::vector<cplx> num(modes, 0.0);
  std::vector<double> den(modes, 0.0);
  for (int i : rings) {
    const double r = grid.radius(i);
    const double w = r * grid.dr();
    for (int n = n_min; n <= n_max; ++n) {
      cplx c = 0.0;
      for (int j = 0; j < nt; ++j) {
        const std::size_t k = grid.index(i, j);
        c += (a[k] - F0z[k]) * std::conj(std::pow(grid.phase(j), n));
      }
      c /= static_cast<double>(nt);
      const double rn = std::pow(r, n);
      num[n - n_min] += w * rn * c;
      den[n - n_min] += w * rn * rn;
    }
  }
  std::vector<cplx> d(modes);
  for (int q = 0; q < modes; ++q) d[q] = num[q] / den[q];

  out.F = grid.complex_field();
  out.Fz = grid.complex_field();
  out.Fzbar = F0zbar;
  const auto nodes = grid.nodes();
  for (std::size_t k = 0; k < n; ++k) {
    const cplx z = nodes[k];
    cplx hz = 0.0;
    cplx h = 0.0;
    for (int q = 0; q < modes; ++q) {
      const int deg = n_min + q;
      const cplx zn = std::pow(z, deg);
      hz += d[q] * zn;
      // The 1/z term would integrate to a multivalued logarithm; F leaves it out, F_z keeps it.
      if (deg != -1) h += d[q] * zn * z / static_cast<double>(deg + 1);
    }
    out.Fz[k] = F0z[k] + hz;
    out.F[k] = F0[k] + h;
  }
  const cplx gauge = out.F[0];
  for (auto& v : out.F.values) v -= gauge;

  std::vector<double> dev(n, 0.0), ref(n, 0.0);
  out.min_Fzbar = std::numeric_limits<double>::infinity();
  const auto w = grid.weights();
  for (std::size_t k = 0; k < n; ++k) {
    if (out.region[k] == 0.0) continue;
    const double s = out.Fzbar[k].real();
    out.min_Fzbar = std::min(out.min_Fzbar, s);
    const double target = profile_a(p, std::max(s, 0.0));
    dev[k] = w[k] * std::abs(std::abs(out.Fz[k]) - target);
    ref[k] = w[k] * std::max(std::abs(out.Fz[k]), target);
  }
  // Below the floor |F_z| is round-off of a numerically conformal map, and relative
  // deviations would only measure noise.
  double area = 0.0;
  for (std::size_t k = 0; k < n; ++k) area += out.region[k] * w[k];
  const double scale = std::max(pairwise_sum(std::span<const double>(ref)), 1e-9 * p * area);
  out.compat_residual = pairwise_sum(std::span<const double>(dev)) / scale;
  return out;
}

void write_hopf_csv(std::ostream& os, const HopfField& field, const DiskGrid& grid) {
  grid.require(field.phi);
  os << "r,theta,re_phi,im_phi\n" << std::setprecision(17);
  for (int i = 0; i < grid.n_r(); ++i)
    for (int j = 0; j < grid.n_theta(); ++j) {
      const cplx v = field.phi[grid.index(i, j)];
      os << grid.radius(i) << ',' << grid.theta(j) << ',' << v.real() << ',' << v.imag() << '\n';
    }
}

void write_profile_tables_csv(std::ostream& os, const ProfileTables& t) {
  os << "s,a,a_prime,b,b_prime\n" << std::setprecision(17);
  for (std::size_t k = 0; k < t.s.size(); ++k)
    os << t.s[k] << ',' << t.a[k] << ',' << t.a_prime[k] << ',' << t.b[k] << ',' << t.b_prime[k] << '\n';
}

}  // namespace pconf
