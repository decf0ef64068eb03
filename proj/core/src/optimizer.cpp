#include "pconf/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "preconditioner.hpp"

namespace pconf {

void SolverConfig::validate() const {
  if (max_iters <= 0) throw std::invalid_argument("max_iters must be positive");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  if (!(step_init > 0.0)) throw std::invalid_argument("step_init must be positive");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw std::invalid_argument("armijo_c must lie in (0,1)");
  if (!(j_floor > 0.0)) throw std::invalid_argument("j_floor must be positive");
  if (memory < 0) throw std::invalid_argument("memory must be non-negative");
  if (panel_size <= 0) throw std::invalid_argument("panel_size must be positive");
}

void ContinuationSchedule::validate() const {
  if (p_values.empty()) throw std::invalid_argument("continuation schedule is empty");
  for (double p : p_values)
    if (!(p > 1.0)) throw std::invalid_argument("continuation exponents must exceed 1");
  const bool up = ascending();
  for (std::size_t k = 1; k < p_values.size(); ++k)
    if ((p_values[k] > p_values[k - 1]) != up || p_values[k] == p_values[k - 1])
      throw std::invalid_argument("continuation schedule must be strictly monotone");
}

namespace {

// Mode-wise harmonic interpolation between a trace on |z| = r_in and one on |z| = r_out
// (r_in = 0 means the disk: coefficients scale as (r / r_out)^{|n|}).
ComplexField harmonic_between(const DiskGrid& g, const BoundaryTrace* inner, double r_in, const BoundaryTrace& outer,
                              double r_out) {
  const int N = std::max(outer.order(), inner ? inner->order() : 0);
  ComplexField f = g.complex_field();
  std::vector<cplx> ring(2 * N + 1);
  for (int i = 0; i < g.n_r(); ++i) {
    const double r = g.radius(i);
    for (int n = -N; n <= N; ++n) {
      const cplx o = outer.coeff(n);
      if (!inner) {
        ring[n + N] = o * std::pow(r / r_out, std::abs(n));
        continue;
      }
      const cplx in = inner->coeff(n);
      const double L = std::log(r_out / r_in);
      const double A = std::log(r / r_in);
      if (n == 0) {
        ring[n + N] = in + (o - in) * (A / L);
      } else {
        // sinh(m x) / sinh(m L) written so that it never overflows for large |n|.
        const double m = std::abs(n);
        auto ratio = [&](double x) {
          return std::exp(m * (x - L)) * (-std::expm1(-2.0 * m * x)) / (-std::expm1(-2.0 * m * L));
        };
        ring[n + N] = o * ratio(A) + in * ratio(L - A);
      }
    }
    for (int j = 0; j < g.n_theta(); ++j) {
      cplx acc = 0.0;
      for (int n = -N; n <= N; ++n) acc += ring[n + N] * std::polar(1.0, n * g.theta(j));
      f[g.index(i, j)] = acc;
    }
  }
  return f;
}

BoundaryTrace ring_trace(const DiskGrid& g, int i, const std::function<cplx(cplx)>& fn) {
  std::vector<cplx> samples(g.n_theta());
  for (int j = 0; j < g.n_theta(); ++j) samples[j] = fn(g.nodes()[g.index(i, j)]);
  return BoundaryTrace::from_samples(samples, g.n_theta() / 2 - 1);
}

}  // namespace

MappingField harmonic_extension(const BoundaryData& boundary, std::shared_ptr<const DiskGrid> grid) {
  const DiskGrid& g = *grid;
  const bool annulus = g.domain().kind == DomainKind::annulus;
  if (annulus && !boundary.inner) throw std::invalid_argument("annulus boundary data needs an inner trace");

  ComplexField f;
  if (boundary.exact) {
    // Interpolate between the innermost and outermost pinned rings, which carry exact values.
    const int io = g.last_free_ring() + 1;
    const BoundaryTrace outer = ring_trace(g, io, boundary.exact);
    if (annulus) {
      const int ii = g.first_free_ring() - 1;
      const BoundaryTrace inner = ring_trace(g, ii, boundary.exact);
      f = harmonic_between(g, &inner, g.radius(ii), outer, g.radius(io));
    } else {
      f = harmonic_between(g, nullptr, 0.0, outer, g.radius(io));
    }
    for (std::size_t k = 0; k < g.size(); ++k)
      if (g.is_pinned(k)) f[k] = boundary.exact(g.nodes()[k]);
  } else {
    f = harmonic_between(g, annulus ? &*boundary.inner : nullptr, g.r_min(), boundary.outer, 1.0);
  }
  MappingField m(std::move(grid), std::move(f));
  m.boundary = boundary.outer;
  return m;
}

MappingField initial_guess(const BoundaryData& boundary, std::shared_ptr<const DiskGrid> grid) {
  if (boundary.outer.winding_number() != 1) throw std::invalid_argument("outer boundary trace must have degree 1");
  if (boundary.inner && boundary.inner->winding_number() != 1)
    throw std::invalid_argument("inner boundary trace must have degree 1");
  return harmonic_extension(boundary, std::move(grid));
}

MappingField initial_guess(const BoundaryTrace& boundary, std::shared_ptr<const DiskGrid> grid) {
  return initial_guess(boundary_from_trace(boundary), std::move(grid));
}

namespace {

double dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<double> terms(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) terms[k] = a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
  return pairwise_sum(std::span<const double>(terms));
}

double median_jacobian(const MappingField& m) {
  RealField J = jacobian(m);
  auto mid = J.values.begin() + J.values.size() / 2;
  std::nth_element(J.values.begin(), mid, J.values.end());
  return *mid;
}

// Blends the free nodes toward the identity until every node has J > 0.
bool pre_regularize(MappingField& m) {
  if (min_energy_jacobian(m) > 0.0) return false;
  const DiskGrid& g = m.grid();
  const std::vector<cplx> start = m.f().values;
  std::vector<cplx> trial(start.size());
  for (double t = 0.5; t < 1.0 - 1e-12; t = 0.5 * (1.0 + t)) {
    for (std::size_t k = 0; k < start.size(); ++k)
      trial[k] = g.is_pinned(k) ? start[k] : (1.0 - t) * start[k] + t * g.nodes()[k];
    m.assign(trial);
    if (min_energy_jacobian(m) > 0.0) return true;
  }
  throw std::domain_error("could not regularize the initial guess to positive Jacobian");
}

// Ring averages of the local curvature of K^p, as the trace of its Hessian in (f_z, f_zbar)
// relative to that of |f_z|^2 + |f_zbar|^2, averaged over both radial rules.
std::vector<double> ring_curvature(const MappingField& m, double p) {
  const DiskGrid& g = m.grid();
  std::vector<double> out(g.n_r(), 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < g.n_r(); ++i) {
    double acc = 0.0;
    int count = 0;
    for (const WirtingerPair* d : {&m.forward(), &m.backward()}) {
      for (int j = 0; j < g.n_theta(); ++j) {
        const std::size_t k = g.index(i, j);
        const double u = std::norm(d->dz[k]);
        const double v = std::norm(d->dzbar[k]);
        const double J = u - v;
        if (!(J > 0.0)) continue;
        const double K = (u + v) / J;
        const double Ku = -2.0 * v / (J * J), Kv = 2.0 * u / (J * J);
        const double Kuu = 4.0 * v / (J * J * J), Kvv = 4.0 * u / (J * J * J);
        const double k1 = p * std::pow(K, p - 1.0), k2 = p * (p - 1.0) * std::pow(K, p - 2.0);
        const double gu = k1 * Ku, guu = k2 * Ku * Ku + k1 * Kuu;
        const double gv = k1 * Kv, gvv = k2 * Kv * Kv + k1 * Kvv;
        acc += 0.5 * (gu + u * guu + gv + v * gvv);
        ++count;
      }
    }
    out[i] = count > 0 && acc > 0.0 ? acc / count : p;
  }
  return out;
}

constexpr int kPreconditionerRefresh = 20;

// The angular derivative zeroes the Nyquist mode (-1)^j, so on a ring that mode is seen
// only through radial differences and the energy barely resists a Nyquist profile that
// is flat across the free rings. Left in the search space it is a near-null direction
// that the preconditioned steps amplify; updates are kept orthogonal to it instead.
void drop_angular_nyquist(std::vector<cplx>& v, const DiskGrid& g) {
  const int nt = g.n_theta();
  for (int i = 0; i < g.n_r(); ++i) {
    cplx c = 0.0;
    for (int j = 0; j < nt; ++j) c += (j % 2 ? -1.0 : 1.0) * v[g.index(i, j)];
    c /= static_cast<double>(nt);
    for (int j = 0; j < nt; ++j) v[g.index(i, j)] -= (j % 2 ? -1.0 : 1.0) * c;
  }
}

struct Pair {
  std::vector<cplx> s;
  std::vector<cplx> y;
  double rho;
};

}  // namespace

SolveResult minimize_from(const MappingField& start, double p, const SolverConfig& config) {
  config.validate();
  if (!(p >= 1.0)) throw std::invalid_argument("energy exponent must be >= 1");

  MappingField m = start;
  const DiskGrid& grid = m.grid();
  const std::size_t n = grid.size();
  const bool regularized = pre_regularize(m);
  const double j_guard = config.j_floor * median_jacobian(m);
  auto precond = std::make_unique<detail::DirichletPreconditioner>(grid, ring_curvature(m, p));

  std::vector<double> dens(n), dens_trial(n), diff(n);
  energy_density(m, p, dens);
  double E = pairwise_sum(std::span<const double>(dens));
  std::vector<cplx> G = energy_gradient(m, p);
  drop_angular_nyquist(G, grid);
  std::vector<cplx> MG(n);
  precond->solve(G, MG);

  std::deque<Pair> history;
  std::vector<cplx> d(n), x_trial(n), q(n), G_new(n);
  std::vector<double> energies{E};
  double t_prev = config.step_init;
  int it = 0;
  bool converged = false;
  std::string diagnosis;
  double rel = std::sqrt(std::max(dot(G, MG), 0.0) / E);

  MappingField trial = m;
  for (; it < config.max_iters; ++it) {
    if (it > 0 && it % kPreconditionerRefresh == 0) {
      // The curvature weights drift as the map moves; the stored pairs belong to the old metric.
      precond = std::make_unique<detail::DirichletPreconditioner>(grid, ring_curvature(m, p));
      precond->solve(G, MG);
      rel = std::sqrt(std::max(dot(G, MG), 0.0) / E);
      history.clear();
    }
    if (rel <= config.grad_tol) {
      converged = true;
      break;
    }

    // Two-loop recursion with the preconditioner as the initial inverse Hessian.
    q = G;
    std::vector<double> coef(history.size());
    for (std::size_t h = history.size(); h-- > 0;) {
      coef[h] = history[h].rho * dot(history[h].s, q);
      for (std::size_t k = 0; k < n; ++k) q[k] -= coef[h] * history[h].y[k];
    }
    precond->solve(q, d);
    if (!history.empty()) {
      const Pair& last = history.back();
      std::vector<cplx> My(n);
      precond->solve(last.y, My);
      const double gamma = dot(last.s, last.y) / dot(last.y, My);
      for (auto& v : d) v *= gamma;
    }
    for (std::size_t h = 0; h < history.size(); ++h) {
      const double beta = history[h].rho * dot(history[h].y, d);
      for (std::size_t k = 0; k < n; ++k) d[k] += (coef[h] - beta) * history[h].s[k];
    }
    for (auto& v : d) v = -v;
    drop_angular_nyquist(d, grid);
    double slope = dot(G, d);
    if (!(slope < 0.0)) {
      history.clear();
      for (std::size_t k = 0; k < n; ++k) d[k] = -MG[k];
      drop_angular_nyquist(d, grid);
      slope = dot(G, d);
    }

    double t = config.memory > 0 ? config.step_init : std::min(2.0 * t_prev, 1e6 * config.step_init);
    bool accepted = false;
    double dE = 0.0;
    while (t >= 1e-14) {
      for (std::size_t k = 0; k < n; ++k) x_trial[k] = grid.is_pinned(k) ? m.f()[k] : m.f()[k] + t * d[k];
      trial.assign(x_trial);
      if (min_energy_jacobian(trial) > j_guard) {
        energy_density(trial, p, dens_trial);
        for (std::size_t k = 0; k < n; ++k) diff[k] = dens_trial[k] - dens[k];
        dE = pairwise_sum(std::span<const double>(diff));
        if (dE <= config.armijo_c * t * slope) {
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      std::ostringstream os;
      os << "line search stalled at iteration " << it << " (relative gradient " << rel << ")";
      diagnosis = os.str();
      break;
    }
    t_prev = t;

    G_new = energy_gradient(trial, p);
    drop_angular_nyquist(G_new, grid);
    Pair pr{std::vector<cplx>(n), std::vector<cplx>(n), 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      pr.s[k] = x_trial[k] - m.f()[k];
      pr.y[k] = G_new[k] - G[k];
    }
    const double sy = dot(pr.s, pr.y);
    std::swap(m, trial);
    std::swap(dens, dens_trial);
    E += dE;
    G.swap(G_new);
    precond->solve(G, MG);
    rel = std::sqrt(std::max(dot(G, MG), 0.0) / E);
    energies.push_back(E);

    if (config.memory > 0 && sy > 1e-300) {
      pr.rho = 1.0 / sy;
      history.push_back(std::move(pr));
      if (static_cast<int>(history.size()) > config.memory) history.pop_front();
    }
  }
  if (!converged && diagnosis.empty()) {
    std::ostringstream os;
    os << "reached max_iters = " << config.max_iters << " with relative gradient " << rel;
    diagnosis = os.str();
  }
  if (converged) diagnosis = "converged";

  SolveResult res(m);
  res.p = p;
  res.report = energy_report(m, p);
  res.residual_panel = residual_panel(m, p, bump_panel(grid, config.panel_size, config.seed));
  res.max_relative_residual = max_relative_inner(res.residual_panel);
  res.iterations = it;
  res.converged = converged;
  res.rel_grad = rel;
  res.min_J = min_energy_jacobian(m);
  res.pre_regularized = regularized;
  res.diagnosis = diagnosis;
  res.energy_history = std::move(energies);
  return res;
}

SolveResult minimize(const BoundaryData& boundary, double p, std::shared_ptr<const DiskGrid> grid,
                     const SolverConfig& config) {
  return minimize_from(initial_guess(boundary, std::move(grid)), p, config);
}

std::vector<SolveResult> continuation(const BoundaryData& boundary, const ContinuationSchedule& schedule,
                                      std::shared_ptr<const DiskGrid> grid, const SolverConfig& config) {
  schedule.validate();
  std::vector<SolveResult> out;
  MappingField current = initial_guess(boundary, std::move(grid));
  for (double p : schedule.p_values) {
    out.push_back(minimize_from(current, p, config));
    if (!out.back().converged) break;
    current = out.back().mapping;
  }
  return out;
}

}  // namespace pconf
