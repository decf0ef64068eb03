#include "pconf/limits.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pconf {

MappingField poisson_extend(const BoundaryTrace& boundary, std::shared_ptr<const DiskGrid> grid) {
  const DiskGrid& g = *grid;
  const int N = boundary.order();
  ComplexField f = g.complex_field();
  std::vector<cplx> ring(2 * N + 1);
  for (int i = 0; i < g.n_r(); ++i) {
    const double r = g.radius(i);
    for (int n = -N; n <= N; ++n) ring[n + N] = boundary.coeff(n) * std::pow(r, std::abs(n));
    for (int j = 0; j < g.n_theta(); ++j) {
      cplx acc = 0.0;
      for (int n = -N; n <= N; ++n) acc += ring[n + N] * std::polar(1.0, n * g.theta(j));
      f[g.index(i, j)] = acc;
    }
  }
  MappingField m(std::move(grid), std::move(f));
  m.boundary = boundary;
  return m;
}

double teich_k(double e_star) {
  const double ratio = e_star / std::numbers::pi;
  if (!(ratio >= 1.0 - 1e-8)) throw std::domain_error("teich_k needs E* >= pi");
  const double x = std::max(ratio, 1.0);
  return std::sqrt((x - 1.0) / (x + 1.0));
}

NormalizedDifferential normalize_differential(std::span<const cplx> phi, std::span<const cplx> points,
                                              std::span<const double> area_weights, double delta, double inner_radius) {
  if (phi.size() != points.size() || phi.size() != area_weights.size())
    throw std::invalid_argument("differential, points and weights must have equal length");
  std::vector<double> terms(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) terms[k] = area_weights[k] * std::abs(phi[k]);
  const double norm = pairwise_sum(std::span<const double>(terms));
  if (!(norm > 0.0)) throw std::domain_error("cannot normalize a differential with zero L1 norm");
  NormalizedDifferential out;
  out.xi.resize(phi.size());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    out.xi[k] = phi[k] / norm;
    terms[k] = area_weights[k] * std::abs(out.xi[k]);
    if (std::abs(points[k]) <= inner_radius) out.sup_inner = std::max(out.sup_inner, std::abs(out.xi[k]));
  }
  out.l1_norm = pairwise_sum(std::span<const double>(terms));
  out.degenerate = out.sup_inner < delta;
  return out;
}

namespace {

// Area weights of the image of the nodes that are free and inside the Hopf mask.
std::vector<double> image_weights(const MappingField& f) {
  const DiskGrid& g = f.grid();
  const RealField mask = hopf_mask(g);
  const RealField J = jacobian(f);
  std::vector<double> w(g.size(), 0.0);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!g.is_pinned(k)) w[k] = mask[k] * g.weights()[k] * std::max(J[k], 0.0);
  return w;
}

}  // namespace

double mu_flatness(const MappingField& f) {
  const auto w = image_weights(f);
  const auto mu = beltrami(f);
  std::vector<double> m0(w.size()), m1(w.size()), m2(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double a = std::abs(mu[k]);
    m0[k] = w[k];
    m1[k] = w[k] * a;
    m2[k] = w[k] * a * a;
  }
  const double s0 = pairwise_sum(std::span<const double>(m0));
  const double mean = pairwise_sum(std::span<const double>(m1)) / s0;
  const double var = pairwise_sum(std::span<const double>(m2)) / s0 - mean * mean;
  return std::sqrt(std::max(var, 0.0));
}

TeichReport teich_diagnostics(const std::vector<SolveResult>& results, double delta) {
  if (results.size() < 3) throw std::invalid_argument("Teichmueller diagnostics need at least three sweep points");
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (!results[k].converged) throw std::invalid_argument("Teichmueller diagnostics need converged results");
    if (k > 0 && !(results[k].p > results[k - 1].p)) throw std::invalid_argument("sweep must be ascending in p");
  }
  TeichReport rep;
  for (const auto& r : results) {
    const double e = energy_p(r.mapping, r.p);
    rep.p_sweep.push_back(r.p);
    rep.energies.push_back(e);
    rep.roots.push_back(std::pow(e / std::numbers::pi, 1.0 / r.p));
    rep.mu_flatness.push_back(mu_flatness(r.mapping));
  }
  for (std::size_t k = 1; k < rep.roots.size(); ++k)
    if (rep.roots[k] < rep.roots[k - 1] * (1.0 - 1e-9)) {
      std::ostringstream os;
      os << "roots decrease between p = " << rep.p_sweep[k - 1] << " and p = " << rep.p_sweep[k];
      rep.warnings.push_back(os.str());
    }

  // Quadratic in t = 1/p through the last three points, evaluated at t = 0.
  const std::size_t n = rep.roots.size();
  double acc = 0.0;
  for (std::size_t a = n - 3; a < n; ++a) {
    double l = 1.0;
    for (std::size_t b = n - 3; b < n; ++b)
      if (b != a) l *= (0.0 - 1.0 / rep.p_sweep[b]) / (1.0 / rep.p_sweep[a] - 1.0 / rep.p_sweep[b]);
    acc += l * rep.roots[a];
  }
  if (acc < 1.0) {
    rep.warnings.push_back("extrapolated root below 1, clamped to 1");
    acc = 1.0;
  }
  rep.extrapolated_root = acc;
  rep.k_estimate = teich_k(std::numbers::pi * acc);

  const MappingField& last = results.back().mapping;
  const ComplexField phi = inverse_hopf_at_image(last, results.back().p);
  const auto w = image_weights(last);
  bool any = false;
  for (std::size_t k = 0; k < w.size(); ++k) any = any || (w[k] > 0.0 && phi[k] != 0.0);
  if (any) {
    rep.xi = normalize_differential(phi.values, last.f().values, w, delta);
    rep.degenerate = rep.xi.degenerate;
  } else {
    rep.warnings.push_back("Hopf differential vanishes; Xi undefined");
  }
  return rep;
}

std::vector<std::vector<double>> cross_energies(const std::vector<SolveResult>& results) {
  std::vector<std::vector<double>> E(results.size(), std::vector<double>(results.size()));
  for (std::size_t i = 0; i < results.size(); ++i)
    for (std::size_t j = 0; j < results.size(); ++j) E[i][j] = energy_p(results[j].mapping, results[i].p);
  return E;
}

double cross_evaluation_violation(const std::vector<SolveResult>& results) {
  const auto E = cross_energies(results);
  double worst = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i)
    for (std::size_t j = 0; j < results.size(); ++j) {
      if (!(results[i].p < results[j].p)) continue;
      worst = std::max(worst, (E[i][i] - E[i][j]) / E[i][j]);
      worst = std::max(worst, (E[i][j] - E[j][j]) / E[j][j]);
    }
  return worst;
}

double douglas_value(const BoundaryTrace& boundary, int n_quad) {
  if (n_quad < 8) throw std::invalid_argument("Douglas quadrature needs n_quad >= 8");
  const double h = 2.0 * std::numbers::pi / n_quad;
  std::vector<cplx> z(n_quad), f(n_quad);
  std::vector<double> d2(n_quad);
  for (int k = 0; k < n_quad; ++k) {
    const double t = k * h;
    z[k] = std::polar(1.0, t);
    f[k] = boundary(t);
    d2[k] = std::norm(boundary.derivative(t));
  }
  auto integrand = [](double q) { return q + std::abs(std::log(q)); };
  std::vector<double> rows(n_quad);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_quad; ++i) {
    std::vector<double> row(n_quad);
    for (int j = 0; j < n_quad; ++j) {
      const int d = std::min(std::abs(i - j), n_quad - std::abs(i - j));
      double q;
      if (d == 0)
        q = d2[i];
      else if (2.0 * std::sin(std::numbers::pi * d / n_quad) < h)
        q = 0.5 * (d2[i] + d2[j]);
      else
        q = std::norm((f[i] - f[j]) / (z[i] - z[j]));
      row[j] = q > 0.0 ? integrand(q) : std::numeric_limits<double>::infinity();
    }
    rows[i] = pairwise_sum(std::span<const double>(row));
  }
  return pairwise_sum(std::span<const double>(rows)) * h * h;
}

DouglasReport douglas_integral(const BoundaryTrace& boundary, int n_quad) {
  DouglasReport r;
  r.value = douglas_value(boundary, n_quad);
  r.refined_value = douglas_value(boundary, 2 * n_quad);
  r.relative_change = std::abs(r.refined_value - r.value) / std::abs(r.refined_value);
  r.finite = std::isfinite(r.value) && std::isfinite(r.refined_value) && r.relative_change < 5e-4;
  return r;
}

namespace {

// Buckets of image points for nearest-neighbour queries.
class PointIndex {
 public:
  explicit PointIndex(std::span<const cplx> pts) : pts_(pts) {
    lo_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    cplx hi{-lo_.real(), -lo_.imag()};
    for (cplx p : pts) {
      lo_ = {std::min(lo_.real(), p.real()), std::min(lo_.imag(), p.imag())};
      hi = {std::max(hi.real(), p.real()), std::max(hi.imag(), p.imag())};
    }
    n_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(pts.size()) / 4.0)));
    cell_ = std::max(hi.real() - lo_.real(), hi.imag() - lo_.imag()) / n_ * (1.0 + 1e-12) + 1e-300;
    buckets_.resize(static_cast<std::size_t>(n_) * n_);
    for (std::size_t k = 0; k < pts.size(); ++k) buckets_[bucket(cell_of(pts[k].real(), 0), cell_of(pts[k].imag(), 1))].push_back(k);
  }

  std::size_t nearest(cplx w) const {
    const int cx = cell_of(w.real(), 0);
    const int cy = cell_of(w.imag(), 1);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring <= n_; ++ring) {
      for (int ix = cx - ring; ix <= cx + ring; ++ix)
        for (int iy = cy - ring; iy <= cy + ring; ++iy) {
          if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != ring) continue;
          if (ix < 0 || iy < 0 || ix >= n_ || iy >= n_) continue;
          for (std::size_t k : buckets_[bucket(ix, iy)]) {
            const double d = std::abs(pts_[k] - w);
            if (d < best_d || (d == best_d && k < best)) {
              best_d = d;
              best = k;
            }
          }
        }
      // Every point not yet visited lies at least `ring` cells away.
      if (best_d <= ring * cell_) break;
    }
    return best;
  }

 private:
  int cell_of(double x, int axis) const {
    const double o = axis == 0 ? lo_.real() : lo_.imag();
    return std::clamp(static_cast<int>(std::floor((x - o) / cell_)), 0, n_ - 1);
  }
  std::size_t bucket(int ix, int iy) const { return static_cast<std::size_t>(iy) * n_ + ix; }

  std::span<const cplx> pts_;
  cplx lo_;
  int n_ = 1;
  double cell_ = 1.0;
  std::vector<std::vector<std::size_t>> buckets_;
};

}  // namespace

PseudoInverse pseudo_inverse(const MappingField& f, std::shared_ptr<const DiskGrid> target) {
  const DiskGrid& g = f.grid();
  const PointIndex index(f.f().values);
  const auto wn = target->nodes();
  ComplexField h = target->complex_field();
  std::vector<char> ok(target->size(), 0);
  std::vector<double> defect(target->size(), 0.0);
  const double r_cap = g.r_max();
  const double r_floor = g.r_min();
  const double max_step = 4.0 * g.dr();
  const double fd_step = 1e-6 * g.dr();

#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t q = 0; q < target->size(); ++q) {
    const cplx w = wn[q];
    const std::size_t k0 = index.nearest(w);
    cplx z = g.nodes()[k0];
    h[q] = z;
    for (int it = 0; it < 40; ++it) {
      const cplx res = w - interpolate_polar(f.f().values, g, z);
      if (std::abs(res) < 1e-12) {
        ok[q] = 1;
        defect[q] = std::abs(res);
        break;
      }
      // Jacobian of the interpolant itself; the grid derivatives f_z, f_zbar differ from it
      // at O(dr^2), which is enough to make Newton crawl where J is small.
      const cplx ex = interpolate_polar(f.f().values, g, z + fd_step) - interpolate_polar(f.f().values, g, z - fd_step);
      const cplx ey = interpolate_polar(f.f().values, g, z + cplx(0.0, fd_step)) -
                      interpolate_polar(f.f().values, g, z - cplx(0.0, fd_step));
      const cplx dx = ex / (2.0 * fd_step), dy = ey / (2.0 * fd_step);
      const cplx a = 0.5 * (dx - cplx(0.0, 1.0) * dy);
      const cplx b = 0.5 * (dx + cplx(0.0, 1.0) * dy);
      const double J = std::norm(a) - std::norm(b);
      if (!(J > 0.0)) break;
      cplx step = (std::conj(a) * res - b * std::conj(res)) / J;
      if (std::abs(step) > max_step) step *= max_step / std::abs(step);
      z += step;
      if (std::abs(z) > r_cap || std::abs(z) < r_floor) break;
    }
    if (ok[q]) h[q] = z;
  }
  PseudoInverse out{MappingField(std::move(target), std::move(h)), 0, 0.0};
  for (std::size_t q = 0; q < ok.size(); ++q) {
    if (ok[q])
      out.max_defect = std::max(out.max_defect, defect[q]);
    else
      ++out.unresolved;
  }
  return out;
}

BoundaryTrace inverse_trace(const BoundaryTrace& boundary, int order) {
  if (boundary.winding_number() != 1) throw std::invalid_argument("only degree-1 traces can be inverted");
  // Unwrapped argument on a fine grid, to bracket each preimage.
  const int M = 4096;
  std::vector<double> A(M + 1);
  A[0] = std::arg(boundary(0.0));
  for (int s = 1; s <= M; ++s) {
    const double t = 2.0 * std::numbers::pi * s / M;
    A[s] = A[s - 1] + std::arg(boundary(t) / boundary(2.0 * std::numbers::pi * (s - 1) / M));
  }
  auto preimage = [&](double theta) {
    double target = theta;
    while (target < A[0]) target += 2.0 * std::numbers::pi;
    while (target >= A[0] + 2.0 * std::numbers::pi) target -= 2.0 * std::numbers::pi;
    const int s = std::clamp(static_cast<int>(std::upper_bound(A.begin(), A.end(), target) - A.begin()) - 1, 0, M - 1);
    double psi = 2.0 * std::numbers::pi * (s + (target - A[s]) / (A[s + 1] - A[s])) / M;
    for (int it = 0; it < 30; ++it) {
      const cplx v = boundary(psi);
      const double r = std::arg(v * std::polar(1.0, -theta));
      const double d = (boundary.derivative(psi) / v).imag();
      const double step = r / d;
      psi -= step;
      if (std::abs(step) < 1e-15) break;
    }
    return std::polar(1.0, psi);
  };
  return BoundaryTrace::from_function(preimage, order, std::max(4 * order, 256));
}

double sup_distance(const MappingField& a, const MappingField& b, double radius) {
  a.grid().require(b.f());
  double worst = 0.0;
  const auto nodes = a.grid().nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k)
    if (std::abs(nodes[k]) <= radius) worst = std::max(worst, std::abs(a.f()[k] - b.f()[k]));
  return worst;
}

std::vector<HarmonicLimitRow> harmonic_limit_table(const std::vector<SolveResult>& results,
                                                   std::shared_ptr<const DiskGrid> target, double radius) {
  if (results.empty()) return {};
  if (target->domain().kind != DomainKind::disk) throw std::invalid_argument("harmonic limit is measured on the disk");
  const auto& boundary = results.front().mapping.boundary;
  if (!boundary) throw std::invalid_argument("sweep results carry no boundary trace");
  const MappingField harmonic = poisson_extend(inverse_trace(*boundary, 64), target);
  std::vector<HarmonicLimitRow> rows;
  for (const auto& r : results) {
    const auto inv = pseudo_inverse(r.mapping, target);
    rows.push_back({r.p, energy_p(r.mapping, r.p), sup_distance(inv.h, harmonic, radius)});
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const TeichReport& report) {
  os << "p,energy,root,k_est,flatness\n" << std::setprecision(17);
  for (std::size_t k = 0; k < report.p_sweep.size(); ++k)
    os << report.p_sweep[k] << ',' << report.energies[k] << ',' << report.roots[k] << ',' << report.k_estimate << ','
       << report.mu_flatness[k] << '\n';
}

}  // namespace pconf
