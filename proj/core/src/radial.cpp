#include "pconf/radial.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace pconf {

namespace {

constexpr double kBranchGap = 1e-9;

// Safeguarded Newton on a bracket [lo, hi] where fn changes sign. fn returns (value, derivative).
template <class Fn>
double bracketed_newton(Fn&& fn, double lo, double hi) {
  auto [flo, dlo] = fn(lo);
  auto [fhi, dhi] = fn(hi);
  (void)dlo;
  (void)dhi;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw std::domain_error("root is not bracketed");
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    auto [fx, dx] = fn(x);
    if (fx == 0.0) return x;
    if ((fx > 0) == (flo > 0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    double next = x - fx / dx;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) return next;
    x = next;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) return x;
  }
  return x;
}

void check_branch(double alpha, Branch branch) {
  if (alpha == 0.0) throw std::domain_error("alpha = 0 gives the identity; no branch to select");
  if ((alpha > 0) != (branch == Branch::above_1))
    throw std::domain_error("alpha > 0 requires the a > 1 branch and alpha < 0 the a < 1 branch");
}

}  // namespace

double profile_equation_residual(double p, double alpha, double rho, double a) {
  const double rhs = alpha * std::pow(a, p + 1.0);
  return (rho * rho * (a * a - 1.0) * std::pow(a * a + 1.0, p - 1.0) - rhs) / std::abs(rhs);
}

Branch branch_for(double alpha) { return alpha > 0 ? Branch::above_1 : Branch::below_1; }

double solve_radial_a(double p, double alpha, double rho, Branch branch) {
  if (!(p > 1.0)) throw std::domain_error("radial profiles need p > 1");
  if (!(rho > 0.0)) throw std::domain_error("radial profiles need rho > 0");
  check_branch(alpha, branch);

  // Logarithmic form of the profile equation; monotone in a on each branch.
  const double target = std::log(std::abs(alpha)) - 2.0 * std::log(rho);
  auto fn = [&](double a) {
    const double a2 = a * a;
    const double val = std::log(std::abs(a2 - 1.0)) + (p - 1.0) * std::log1p(a2) - (p + 1.0) * std::log(a) - target;
    const double der = 2.0 * a / (a2 - 1.0) + 2.0 * (p - 1.0) * a / (a2 + 1.0) - (p + 1.0) / a;
    return std::pair{val, der};
  };

  double a;
  if (branch == Branch::above_1) {
    double lo = 1.0 + kBranchGap;
    double hi = 2.0;
    while (fn(hi).first < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e150) throw std::domain_error("no root on the a > 1 branch");
    }
    if (fn(lo).first > 0.0) throw std::domain_error("root lies inside the excluded gap around a = 1");
    a = bracketed_newton(fn, lo, hi);
  } else {
    double lo = 0.5;
    double hi = 1.0 - kBranchGap;
    while (fn(lo).first < 0.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-150) throw std::domain_error("no root on the a < 1 branch");
    }
    if (fn(hi).first > 0.0) throw std::domain_error("root lies inside the excluded gap around a = 1");
    a = bracketed_newton(fn, lo, hi);
  }
  return a;
}

double radial_log_antiderivative(double p, double a) {
  if (a == 1.0) throw std::domain_error("log F is singular at a = 1");
  return -0.5 * (p - 1.0) * a + (p - 1.0) * std::atan(a) + 0.5 * std::log(std::abs((a + 1.0) / (a - 1.0)));
}

double RadialProfile::a_at(double r) const { return solve_radial_a(p, alpha, r, branch); }

double RadialProfile::F_at(double r) const { return std::exp(radial_log_antiderivative(p, a_at(r)) + C1); }

double RadialProfile::rho_of_F(double s) const {
  if (!(s > 0.0 && s <= 1.0 + 1e-12)) throw std::domain_error("F^{-1} is defined on (0, 1]");
  // G is monotone in a on each branch; invert it, then recover rho from the profile equation.
  const double target = std::log(s) - C1;
  auto fn = [&](double a) {
    const double val = radial_log_antiderivative(p, a) - target;
    const double der = -0.5 * (p - 1.0) + (p - 1.0) / (1.0 + a * a) - 1.0 / (a * a - 1.0);
    return std::pair{val, der};
  };
  double a;
  if (branch == Branch::above_1) {
    double lo = 1.0 + kBranchGap;
    double hi = 2.0;
    while (fn(hi).first > 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e150) throw std::domain_error("F^{-1} out of range");
    }
    a = bracketed_newton(fn, lo, hi);
  } else {
    double lo = 0.5;
    double hi = 1.0 - kBranchGap;
    while (fn(lo).first > 0.0) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-150) throw std::domain_error("F^{-1} out of range");
    }
    a = bracketed_newton(fn, lo, hi);
  }
  const double a2 = a * a;
  return std::sqrt(alpha * std::pow(a, p + 1.0) / ((a2 - 1.0) * std::pow(a2 + 1.0, p - 1.0)));
}

RadialProfile radial_profile(double p, double alpha, Branch branch, std::vector<double> rho_grid) {
  check_branch(alpha, branch);
  for (std::size_t k = 0; k < rho_grid.size(); ++k) {
    if (!(rho_grid[k] > 0.0 && rho_grid[k] <= 1.0)) throw std::domain_error("profile radii must lie in (0, 1]");
    if (k > 0 && !(rho_grid[k] > rho_grid[k - 1])) throw std::domain_error("profile radii must be ascending");
  }
  RadialProfile prof;
  prof.p = p;
  prof.alpha = alpha;
  prof.branch = branch;
  prof.C1 = -radial_log_antiderivative(p, solve_radial_a(p, alpha, 1.0, branch));
  prof.rho = std::move(rho_grid);
  prof.a.reserve(prof.rho.size());
  prof.F.reserve(prof.rho.size());
  for (double r : prof.rho) {
    const double a = solve_radial_a(p, alpha, r, branch);
    prof.a.push_back(a);
    prof.F.push_back(std::exp(radial_log_antiderivative(p, a) + prof.C1));
  }
  return prof;
}

MappingField radial_map(const RadialProfile& profile, std::shared_ptr<const DiskGrid> grid) {
  if (!profile.rho.empty() && grid->r_min() + 0.5 * grid->dr() < profile.rho.front() * (1.0 - 1e-12))
    throw std::domain_error("grid reaches below the profile's radial range");
  std::vector<double> Fr(grid->n_r());
  for (int i = 0; i < grid->n_r(); ++i) Fr[i] = profile.F_at(grid->radius(i));
  ComplexField f = grid->complex_field();
  for (int i = 0; i < grid->n_r(); ++i)
    for (int j = 0; j < grid->n_theta(); ++j) f[grid->index(i, j)] = Fr[i] * grid->phase(j);
  return MappingField(std::move(grid), std::move(f));
}

MappingField radial_inverse_map(const RadialProfile& profile, std::shared_ptr<const DiskGrid> grid) {
  std::vector<double> rr(grid->n_r());
  for (int i = 0; i < grid->n_r(); ++i) rr[i] = profile.rho_of_F(grid->radius(i));
  ComplexField h = grid->complex_field();
  for (int i = 0; i < grid->n_r(); ++i)
    for (int j = 0; j < grid->n_theta(); ++j) h[grid->index(i, j)] = rr[i] * grid->phase(j);
  return MappingField(std::move(grid), std::move(h));
}

BoundaryData radial_boundary(const RadialProfile& profile, double rho_inner) {
  BoundaryData data;
  data.outer = BoundaryTrace({{1, profile.F_at(1.0)}});
  data.inner = BoundaryTrace({{1, profile.F_at(rho_inner)}});
  RadialProfile copy = profile;
  data.exact = [copy](cplx z) {
    const double r = std::abs(z);
    return copy.F_at(r) * (z / r);
  };
  return data;
}

double radial_inverse_hopf_constant(double p, double alpha) { return -alpha / std::pow(2.0, p + 1.0); }

void write_profile_csv(std::ostream& os, const RadialProfile& profile) {
  os << std::setprecision(17);
  os << "# {\"p\": " << profile.p << ", \"alpha\": " << profile.alpha << ", \"C1\": " << profile.C1
     << ", \"m\": " << profile.m << ", \"branch\": \"" << (profile.branch == Branch::above_1 ? "above_1" : "below_1")
     << "\"}\n";
  os << "rho,a,F,residual\n";
  for (std::size_t k = 0; k < profile.rho.size(); ++k)
    os << profile.rho[k] << ',' << profile.a[k] << ',' << profile.F[k] << ','
       << profile_equation_residual(profile.p, profile.alpha, profile.rho[k], profile.a[k]) << '\n';
}

}  // namespace pconf
