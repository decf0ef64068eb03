#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "oracle_values.hpp"
#include "pconf/energy.hpp"
#include "pconf/radial.hpp"

using namespace pconf;

namespace {
constexpr double kAlpha = 15.0 / 8.0;
}

TEST(RadialProfile, MatchesFrozenRootsAndQuadrature) {
  std::vector<double> rho;
  for (const auto& row : oracle::kRadialP2) rho.push_back(row[0]);
  const auto prof = radial_profile(2.0, kAlpha, Branch::above_1, rho);
  for (std::size_t k = 0; k < rho.size(); ++k) {
    EXPECT_NEAR(prof.a[k], oracle::kRadialP2[k][1], 1e-13 * oracle::kRadialP2[k][1]);
    // F from the closed antiderivative against F from quadrature of a(s)/s
    EXPECT_NEAR(prof.F[k], oracle::kRadialP2[k][2], 1e-12);
    EXPECT_NEAR(prof.F_at(rho[k]), oracle::kRadialP2[k][2], 1e-12);
  }
  const auto p15 = radial_profile(1.5, kAlpha, Branch::above_1, {0.7, 1.0});
  EXPECT_NEAR(p15.a[0], oracle::kRadialP1_5At07[0], 1e-12 * p15.a[0]);
  EXPECT_NEAR(p15.F[0], oracle::kRadialP1_5At07[1], 1e-12);
  const auto p3 = radial_profile(3.0, kAlpha, Branch::above_1, {0.7, 1.0});
  EXPECT_NEAR(p3.a[0], oracle::kRadialP3_0At07[0], 1e-13);
  EXPECT_NEAR(p3.F[0], oracle::kRadialP3_0At07[1], 1e-12);
}

TEST(RadialProfile, EquationResidualIsAtRoundOff) {
  std::vector<double> rho;
  for (int k = 0; k <= 200; ++k) rho.push_back(0.05 + 0.95 * k / 200.0);
  for (double p : {1.1, 2.0, 5.0}) {
    for (double alpha : {kAlpha, -0.3}) {
      const auto prof = radial_profile(p, alpha, branch_for(alpha), rho);
      for (std::size_t k = 0; k < rho.size(); ++k)
        EXPECT_LT(std::abs(profile_equation_residual(p, alpha, rho[k], prof.a[k])), 1e-12);
    }
  }
}

TEST(RadialProfile, BranchesFollowTheSignOfAlpha) {
  EXPECT_EQ(branch_for(1.0), Branch::above_1);
  EXPECT_EQ(branch_for(-1.0), Branch::below_1);
  EXPECT_THROW(solve_radial_a(2.0, 1.0, 0.5, Branch::below_1), std::domain_error);
  EXPECT_THROW(solve_radial_a(2.0, 0.0, 0.5, Branch::above_1), std::domain_error);
  EXPECT_THROW(solve_radial_a(1.0, 1.0, 0.5, Branch::above_1), std::domain_error);
  EXPECT_LT(solve_radial_a(2.0, -0.3, 0.5, Branch::below_1), 1.0);
}

TEST(RadialProfile, FIsIncreasingAndInvertible) {
  const auto prof = radial_profile(2.0, kAlpha, Branch::above_1, {0.5, 1.0});
  double last = 0.0;
  for (double r = 0.5; r <= 1.0; r += 0.05) {
    const double F = prof.F_at(r);
    EXPECT_GT(F, last);
    last = F;
    EXPECT_NEAR(prof.rho_of_F(F), r, 1e-12);
  }
  EXPECT_NEAR(prof.F_at(1.0), 1.0, 1e-15);
}

TEST(RadialMap, InverseHopfConstantMatchesOracle) {
  EXPECT_NEAR(radial_inverse_hopf_constant(2.0, kAlpha), oracle::kInverseHopfP2[0], 1e-15);
  EXPECT_NEAR(radial_inverse_hopf_constant(2.0, kAlpha), oracle::kInverseHopfP2[1], 1e-15);
  EXPECT_NEAR(radial_inverse_hopf_constant(3.0, kAlpha), oracle::kInverseHopfP3[0], 1e-15);
}

TEST(RadialMap, SampledMapIsNearlyStationary) {
  const auto prof = radial_profile(2.0, kAlpha, Branch::above_1, {0.5, 1.0});
  auto res = [&](int n) {
    const auto g = std::make_shared<const DiskGrid>(Domain::annulus(0.5), n, 2 * n);
    const auto m = radial_map(prof, g);
    return max_relative_inner(residual_panel(m, 2.0, bump_panel(*g, 20, 1)));
  };
  const double r1 = res(64), r2 = res(128);
  EXPECT_LT(r2, 1e-2);
  EXPECT_GT(r1 / r2, 1.5);
}

TEST(RadialMap, BoundaryDataAndInverseAreConsistent) {
  const auto prof = radial_profile(2.0, kAlpha, Branch::above_1, {0.5, 1.0});
  const auto data = radial_boundary(prof, 0.5);
  ASSERT_TRUE(data.inner.has_value());
  EXPECT_NEAR(std::abs((*data.inner)(0.3)), prof.F_at(0.5), 1e-12);
  EXPECT_NEAR(std::abs(data.outer(1.1) - std::exp(cplx(0, 1.1))), 0.0, 1e-14);
  const auto img = std::make_shared<const DiskGrid>(Domain::annulus(prof.F_at(0.5)), 16, 32);
  const auto h = radial_inverse_map(prof, img);
  for (std::size_t k = 0; k < img->size(); ++k) {
    const cplx w = img->nodes()[k];
    const cplx back = prof.F_at(std::abs(h.f()[k])) * h.f()[k] / std::abs(h.f()[k]);
    EXPECT_NEAR(std::abs(back - w), 0.0, 1e-12);
  }
}

TEST(RadialProfile, CsvHasResidualColumn) {
  const auto prof = radial_profile(2.0, kAlpha, Branch::above_1, {0.1, 0.5, 1.0});
  std::stringstream ss;
  write_profile_csv(ss, prof);
  std::string header, cols, row;
  std::getline(ss, header);
  std::getline(ss, cols);
  EXPECT_EQ(header.front(), '#');
  EXPECT_EQ(cols, "rho,a,F,residual");
  int n = 0;
  while (std::getline(ss, row)) {
    ++n;
    EXPECT_LT(std::abs(std::stod(row.substr(row.rfind(',') + 1))), 1e-10);
  }
  EXPECT_EQ(n, 3);
}
