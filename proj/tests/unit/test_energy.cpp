#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "pconf/energy.hpp"
#include "test_support.hpp"

using namespace pconf;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const DiskGrid> make(Domain d, int nr, int nt) { return std::make_shared<const DiskGrid>(d, nr, nt); }

MappingField perturbed_identity(std::shared_ptr<const DiskGrid> g) {
  return MappingField::sample(std::move(g), [](cplx z) {
    const double s = 1.0 - std::norm(z);
    return z + 0.08 * s * (z * z + cplx(0.0, 0.5) * std::conj(z));
  });
}

}  // namespace

TEST(Energy, IdentityHasAreaEnergyForAllP) {
  for (const Domain d : {Domain::disk(), Domain::annulus(0.5)}) {
    const auto g = make(d, 16, 32);
    const auto id = MappingField::sample(g, [](cplx z) { return z; });
    for (double p : {1.05, 2.0, 7.0}) {
      EXPECT_NEAR(energy_p(id, p), d.area(), 1e-13);
      EXPECT_NEAR(energy_star(id, p), d.area(), 1e-13);
    }
  }
}

TEST(Energy, AffineMapMatchesClosedForm) {
  const auto g = make(Domain::disk(), 16, 32);
  const cplx c{0.2, 0.25};
  const auto m = MappingField::sample(g, [&](cplx z) { return 0.5 + z + c * std::conj(z); });
  const double K = (1.0 + std::norm(c)) / (1.0 - std::norm(c));
  for (double p : {1.5, 3.0}) {
    EXPECT_NEAR(energy_p(m, p), kPi * std::pow(K, p), 1e-12);
    EXPECT_NEAR(energy_star(m, p), kPi * std::pow(K, p) * (1.0 - std::norm(c)), 1e-12);
  }
}

TEST(Energy, DensitySumsToEnergy) {
  const auto g = make(Domain::annulus(0.3), 12, 24);
  const auto m = perturbed_identity(g);
  std::vector<double> dens(g->size());
  energy_density(m, 2.5, dens);
  EXPECT_EQ(pairwise_sum(std::span<const double>(dens)), energy_p(m, 2.5));
}

TEST(Energy, HolderBoundHolds) {
  const auto m = perturbed_identity(make(Domain::disk(), 16, 32));
  for (double p : {1.2, 2.0, 4.0}) {
    const auto h = holder_bound(m, p);
    EXPECT_LE(h.lhs, h.rhs * (1.0 + 1e-12));
  }
  const auto id = MappingField::sample(make(Domain::disk(), 8, 16), [](cplx z) { return z; });
  const auto h = holder_bound(id, 2.0);
  EXPECT_NEAR(h.lhs, h.rhs, 1e-12 * h.rhs);
}

// Two independent routes to the same derivative: the analytic adjoint gradient and
// central differences of the energy itself.
TEST(EnergyGradient, MatchesCentralDifferences) {
  for (const Domain d : {Domain::disk(), Domain::annulus(0.5)}) {
    const auto g = make(d, 12, 24);
    const auto m = perturbed_identity(g);
    const double p = 2.7;
    const auto grad = energy_gradient(m, p);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, g->size() - 1);
    int checked = 0;
    while (checked < 15) {
      const std::size_t k = pick(rng);
      if (g->is_pinned(k)) {
        EXPECT_EQ(grad[k], cplx(0.0));
        continue;
      }
      ++checked;
      const double h = 1e-6;
      auto shifted = [&](cplx dz) {
        std::vector<cplx> v = m.f().values;
        v[k] += dz;
        MappingField mm = m;
        mm.assign(v);
        return energy_p(mm, p);
      };
      const double gre = (shifted(h) - shifted(-h)) / (2 * h);
      const double gim = (shifted(cplx(0, h)) - shifted(cplx(0, -h))) / (2 * h);
      const double scale = std::max(std::abs(grad[k]), 1e-8);
      EXPECT_LT(std::abs(grad[k] - cplx(gre, gim)) / scale, 1e-6) << "node " << k;
    }
  }
}

TEST(EnergyGradient, ThrowsOnFoldedMap) {
  const auto g = make(Domain::disk(), 8, 16);
  const auto m = MappingField::sample(g, [](cplx z) { return std::conj(z); });
  EXPECT_THROW(energy_gradient(m, 2.0), std::exception);
}

TEST(Bumps, SupportIsCompactAndDerivativesAgreeWithTheStencil) {
  auto check = [](int n) {
    const DiskGrid g(Domain::disk(), n, 2 * n);
    const auto b = make_bump(g, {0.2, -0.1}, 0.4, 2.0);
    for (std::size_t k = 0; k < g.size(); ++k)
      if (std::abs(g.nodes()[k] - b.center) >= 0.4) EXPECT_EQ(b.phi[k], cplx(0.0));
    const auto w = wirtinger(b.phi, g);
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      err = std::max(err, std::abs(w.dz[k] - b.phi_z[k]) + std::abs(w.dzbar[k] - b.phi_zbar[k]));
      scale = std::max(scale, std::abs(b.phi_z[k]));
    }
    return err / scale;
  };
  const double e64 = check(64), e128 = check(128);
  EXPECT_LT(e128, 3e-2);
  EXPECT_GT(e64 / e128, 3.0);
}

TEST(Bumps, PanelIsSeededAndResolutionIndependent) {
  const DiskGrid a(Domain::annulus(0.5), 32, 64);
  const DiskGrid b(Domain::annulus(0.5), 64, 128);
  const auto pa = bump_panel(a, 20, 3);
  const auto pb = bump_panel(b, 20, 3);
  const auto pc = bump_panel(a, 20, 4);
  ASSERT_EQ(pa.size(), 20u);
  bool differs = false;
  for (std::size_t k = 0; k < pa.size(); ++k) {
    EXPECT_EQ(pa[k].center, pb[k].center);
    EXPECT_EQ(pa[k].radius, pb[k].radius);
    differs |= pa[k].center != pc[k].center;
  }
  EXPECT_TRUE(differs);
}

// Affine maps are exactly stationary; what remains is the quadrature error of
// integrals of exact bump derivatives, which vanishes under refinement.
TEST(Residuals, AffineMapsAreStationary) {
  auto res = [](int n) {
    const auto g = make(Domain::disk(), n, 2 * n);
    const auto m = MappingField::sample(g, [](cplx z) { return z + 0.3 * std::conj(z); });
    return max_relative_inner(residual_panel(m, 2.0, bump_panel(*g, 10, 1)));
  };
  const double r64 = res(64), r128 = res(128);
  EXPECT_LT(r64, 1e-3);
  EXPECT_GT(r64 / r128, 3.0);
}

TEST(Residuals, PerturbedIdentityIsNotStationary) {
  const auto g = make(Domain::disk(), 64, 128);
  const auto m = perturbed_identity(g);
  const auto panel = residual_panel(m, 2.0, bump_panel(*g, 20, 1));
  EXPECT_GT(max_relative_inner(panel), 1e-2);
}

TEST(EnergyReport, CollectsConsistentValues) {
  const auto g = make(Domain::disk(), 16, 32);
  const auto m = perturbed_identity(g);
  const auto r = energy_report(m, 3.0);
  EXPECT_EQ(r.p, 3.0);
  EXPECT_EQ(r.energy_p, energy_p(m, 3.0));
  EXPECT_GE(r.energy_p, kPi);
  EXPECT_EQ(r.orientation_violations, 0u);
}
