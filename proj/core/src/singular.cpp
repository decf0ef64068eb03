#include "pconf/singular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"

namespace pconf {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double l2_norm(std::span<const cplx> v) {
  std::vector<double> sq(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) sq[k] = std::norm(v[k]);
  return std::sqrt(pairwise_sum(std::span<const double>(sq)));
}

void apply_multiplier(BoxField& field, const TransformPlan& plan, std::span<const cplx> mult) {
  plan.fft().forward(field.values);
  const double scale = 1.0 / static_cast<double>(plan.size());
  for (std::size_t k = 0; k < field.values.size(); ++k) field.values[k] *= mult[k] * scale;
  plan.fft().backward(field.values);
}

cplx box_mean(const BoxField& f) {
  return pairwise_sum(std::span<const cplx>(f.values)) / static_cast<double>(f.values.size());
}

// Weights of the Lagrange polynomial through nodes 0..order-1 evaluated at t.
void lagrange_weights(double t, int order, double* w) {
  for (int a = 0; a < order; ++a) {
    double v = 1.0;
    for (int b = 0; b < order; ++b)
      if (b != a) v *= (t - b) / static_cast<double>(a - b);
    w[a] = v;
  }
}

}  // namespace

TransformPlan::TransformPlan(int n_fft, double box_size) : n_(n_fft), box_(box_size) {
  if (!is_power_of_two(n_fft) || n_fft < 8) throw std::invalid_argument("n_fft must be a power of two >= 8");
  if (!(box_size > 0.0)) throw std::invalid_argument("box size must be positive");
  const std::size_t n = size();
  cauchy_.resize(n);
  beurling_.resize(n);
  dz_.resize(n);
  dzbar_.resize(n);
  const double base = 2.0 * std::numbers::pi / box_size;
  const cplx I(0.0, 1.0);
  for (int my = 0; my < n_; ++my) {
    const int ky = my < n_ / 2 ? my : my - n_;
    for (int mx = 0; mx < n_; ++mx) {
      const int kx = mx < n_ / 2 ? mx : mx - n_;
      const cplx k(base * kx, base * ky);
      const std::size_t idx = index(mx, my);
      dz_[idx] = 0.5 * I * std::conj(k);
      dzbar_[idx] = 0.5 * I * k;
      if (kx == 0 && ky == 0) {
        cauchy_[idx] = 0.0;
        beurling_[idx] = 0.0;
      } else {
        cauchy_[idx] = -2.0 * I / k;
        beurling_[idx] = std::conj(k) / k;
      }
    }
  }
  fft_ = std::make_shared<const detail::FftPlan>(detail::FftPlan::Kind::square_2d, n_fft);
}

TransformPlan TransformPlan::around_disk(int n_fft, double radius, double padding) {
  if (!(padding >= 2.0)) throw std::invalid_argument("padding must be at least 2");
  if (!(radius > 0.0)) throw std::invalid_argument("support radius must be positive");
  return TransformPlan(n_fft, padding * 2.0 * radius);
}

BoxField box_field(const TransformPlan& plan, cplx fill) {
  return {plan.n_fft(), plan.box_size(), std::vector<cplx>(plan.size(), fill)};
}

void require_plan(const BoxField& field, const TransformPlan& plan) {
  if (field.n != plan.n_fft() || field.box_size != plan.box_size() || field.values.size() != plan.size())
    throw std::invalid_argument("box field was sampled for a different transform plan");
}

BoxField disk_indicator(const TransformPlan& plan, double radius) {
  BoxField chi = box_field(plan);
  const double h = plan.spacing();
  const double half_diag = h / std::numbers::sqrt2;
  constexpr int kSub = 32;
  for (int iy = 0; iy < plan.n_fft(); ++iy) {
    for (int ix = 0; ix < plan.n_fft(); ++ix) {
      const cplx c = plan.node(ix, iy);
      const double d = std::abs(c);
      double frac;
      if (d + half_diag <= radius) {
        frac = 1.0;
      } else if (d - half_diag >= radius) {
        frac = 0.0;
      } else {
        int inside = 0;
        for (int a = 0; a < kSub; ++a)
          for (int b = 0; b < kSub; ++b) {
            const cplx z = c + cplx((a + 0.5) / kSub - 0.5, (b + 0.5) / kSub - 0.5) * h;
            if (std::abs(z) < radius) ++inside;
          }
        frac = static_cast<double>(inside) / (kSub * kSub);
      }
      chi[plan.index(ix, iy)] = frac;
    }
  }
  return chi;
}

BoxField cauchy_transform(const BoxField& g, const TransformPlan& plan) {
  require_plan(g, plan);
  // Support check: nothing may live outside the central half box, or the periodic
  // images start to interact.
  double inside = 0.0;
  double outside = 0.0;
  const double quarter = 0.25 * plan.box_size();
  for (int iy = 0; iy < plan.n_fft(); ++iy)
    for (int ix = 0; ix < plan.n_fft(); ++ix) {
      const cplx z = plan.node(ix, iy);
      const double a = std::abs(g[plan.index(ix, iy)]);
      if (std::abs(z.real()) < quarter && std::abs(z.imag()) < quarter)
        inside = std::max(inside, a);
      else
        outside = std::max(outside, a);
    }
  if (outside > 1e-12 * std::max(inside, 1e-300))
    throw std::domain_error("density leaks outside the central half of the transform box");

  const cplx mean = box_mean(g);
  BoxField out = g;
  apply_multiplier(out, plan, plan.cauchy_multiplier());
  for (int iy = 0; iy < plan.n_fft(); ++iy)
    for (int ix = 0; ix < plan.n_fft(); ++ix) out[plan.index(ix, iy)] += mean * std::conj(plan.node(ix, iy));
  const cplx shift = box_mean(out);
  for (auto& v : out.values) v -= shift;
  return out;
}

BoxField beurling_transform(const BoxField& g, const TransformPlan& plan) {
  require_plan(g, plan);
  BoxField out = g;
  apply_multiplier(out, plan, plan.beurling_multiplier());
  return out;
}

BoxWirtinger box_wirtinger(const BoxField& field, const TransformPlan& plan) {
  require_plan(field, plan);
  BoxWirtinger out{field, field};
  apply_multiplier(out.dz, plan, plan.dz_multiplier());
  apply_multiplier(out.dzbar, plan, plan.dzbar_multiplier());
  return out;
}

BeltramiProblem beltrami_problem(BoxField mu, const TransformPlan& plan) {
  require_plan(mu, plan);
  const double reach = 1.0 + plan.spacing() * std::numbers::sqrt2;
  double k = 0.0;
  for (int iy = 0; iy < plan.n_fft(); ++iy)
    for (int ix = 0; ix < plan.n_fft(); ++ix) {
      const double a = std::abs(mu[plan.index(ix, iy)]);
      if (a == 0.0) continue;
      if (std::abs(plan.node(ix, iy)) > reach) throw std::domain_error("Beltrami coefficient must vanish outside the unit disk");
      k = std::max(k, a);
    }
  if (!(k < 1.0)) throw std::domain_error("Beltrami coefficient needs ess sup |mu| < 1");
  BeltramiProblem prob;
  prob.mu = std::move(mu);
  prob.k_inf = k;
  return prob;
}

BeltramiSolution solve_beltrami(const BeltramiProblem& problem, const TransformPlan& plan, double tol, int max_iter) {
  require_plan(problem.mu, plan);
  if (!(problem.k_inf < 1.0)) throw std::domain_error("Beltrami coefficient needs ess sup |mu| < 1");
  if (!(tol > 0.0) || max_iter < 1) throw std::invalid_argument("solver needs tol > 0 and max_iter >= 1");
  const auto& mu = problem.mu.values;
  const std::size_t n = plan.size();

  BeltramiSolution sol;
  sol.g = box_field(plan);
  BoxField next = box_field(plan);
  std::vector<cplx> diff(n);
  double scale = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    BoxField s = beurling_transform(sol.g, plan);
    for (std::size_t k = 0; k < n; ++k) next[k] = mu[k] * (1.0 + s[k]);
    for (std::size_t k = 0; k < n; ++k) diff[k] = next[k] - sol.g[k];
    const double upd = l2_norm(diff);
    std::swap(sol.g, next);
    sol.update_norms.push_back(upd);
    sol.iterations = it;
    scale = std::max(scale, l2_norm(sol.g.values));
    if (it >= 2 && sol.update_norms[it - 2] > 1e3 * std::numeric_limits<double>::epsilon() * scale)
      sol.contraction_ratio = std::max(sol.contraction_ratio, upd / sol.update_norms[it - 2]);
    if (upd <= tol * std::max(scale, 1e-300) || upd == 0.0) {
      sol.converged = true;
      break;
    }
  }

  BoxField s = beurling_transform(sol.g, plan);
  std::vector<cplx> defect(n), fz(n);
  for (std::size_t k = 0; k < n; ++k) {
    fz[k] = 1.0 + s[k];
    defect[k] = sol.g[k] - mu[k] * fz[k];
  }
  sol.residual = l2_norm(defect) / l2_norm(fz);

  sol.f = cauchy_transform(sol.g, plan);
  for (int iy = 0; iy < plan.n_fft(); ++iy)
    for (int ix = 0; ix < plan.n_fft(); ++ix) sol.f[plan.index(ix, iy)] += plan.node(ix, iy);

  if (sol.converged) {
    sol.diagnosis = "converged";
  } else {
    std::ostringstream os;
    os << "no convergence in " << max_iter << " Picard steps (k_inf = " << problem.k_inf << ", last update "
       << sol.update_norms.back() << ")";
    sol.diagnosis = os.str();
  }
  return sol;
}

std::vector<cplx> truncate_mu(std::span<const cplx> mu, int m) {
  if (m < 2) throw std::invalid_argument("truncation index must be >= 2");
  const double cap = 1.0 - 1.0 / m;
  std::vector<cplx> out(mu.begin(), mu.end());
  for (auto& v : out) {
    const double a = std::abs(v);
    if (a > 1.0 + 1e-12) throw std::domain_error("truncate_mu expects |mu| <= 1");
    if (a > cap) v *= cap / a;
  }
  return out;
}

ComplexField truncate_mu(const ComplexField& mu, int m) { return {mu.tag, truncate_mu(mu.values, m)}; }

BoxField truncate_mu(const BoxField& mu, int m) { return {mu.n, mu.box_size, truncate_mu(mu.values, m)}; }

cplx interpolate(const BoxField& field, const TransformPlan& plan, cplx z, int order) {
  require_plan(field, plan);
  if (order < 2 || order % 2 != 0 || order > 12) throw std::invalid_argument("interpolation order must be even, 2..12");
  const double h = plan.spacing();
  const int n = plan.n_fft();
  const double tx = (z.real() + 0.5 * plan.box_size()) / h;
  const double ty = (z.imag() + 0.5 * plan.box_size()) / h;
  const int x0 = static_cast<int>(std::floor(tx)) - order / 2 + 1;
  const int y0 = static_cast<int>(std::floor(ty)) - order / 2 + 1;
  double wx[12], wy[12];
  lagrange_weights(tx - x0, order, wx);
  lagrange_weights(ty - y0, order, wy);
  cplx acc = 0.0;
  for (int b = 0; b < order; ++b) {
    const int iy = ((y0 + b) % n + n) % n;
    cplx row = 0.0;
    for (int a = 0; a < order; ++a) row += wx[a] * field[plan.index(((x0 + a) % n + n) % n, iy)];
    acc += wy[b] * row;
  }
  return acc;
}

ComplexField box_to_grid(const BoxField& field, const TransformPlan& plan, const DiskGrid& grid, int order) {
  ComplexField out = grid.complex_field();
  const auto nodes = grid.nodes();
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = interpolate(field, plan, nodes[k], order);
  return out;
}

BoxField grid_to_box(const ComplexField& field, const DiskGrid& grid, const TransformPlan& plan) {
  grid.require(field);
  BoxField out = box_field(plan);
  const double r_lo = grid.r_min();
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < plan.n_fft(); ++iy) {
    for (int ix = 0; ix < plan.n_fft(); ++ix) {
      const cplx z = plan.node(ix, iy);
      const double r = std::abs(z);
      if (r >= 1.0 || (r_lo > 0.0 && r <= r_lo)) continue;
      out[plan.index(ix, iy)] = interpolate_polar(field.values, grid, z);
    }
  }
  return out;
}

MappingField beltrami_mapping(const BeltramiSolution& solution, const TransformPlan& plan,
                              std::shared_ptr<const DiskGrid> grid) {
  ComplexField f = box_to_grid(solution.f, plan, *grid);
  return MappingField(std::move(grid), std::move(f));
}

}  // namespace pconf
