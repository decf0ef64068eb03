#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "oracle_values.hpp"
#include "pconf/fields.hpp"

using namespace pconf;

TEST(BoundaryTrace, SinusoidalMatchesJacobiAnger) {
  const auto t = sinusoidal_trace(0.2);
  for (const auto& row : oracle::kSinusoidalCoeffs) {
    const int n = static_cast<int>(row[0]);
    EXPECT_NEAR(t.coeff(n).real(), row[1], 1e-16) << "n = " << n;
    EXPECT_NEAR(t.coeff(n).imag(), 0.0, 1e-16);
  }
  for (double th : {0.0, 0.7, 2.5, 5.9})
    EXPECT_NEAR(std::abs(t(th) - std::exp(cplx(0, th + 0.2 * std::sin(th)))), 0.0, 1e-15);
}

TEST(BoundaryTrace, DegreeAndModulus) {
  EXPECT_EQ(identity_trace().winding_number(), 1);
  EXPECT_EQ(sinusoidal_trace(0.3).winding_number(), 1);
  EXPECT_LT(sinusoidal_trace(0.3).modulus_defect(), 1e-14);
  EXPECT_EQ(BoundaryTrace({{-1, 1.0}}).winding_number(), -1);
  EXPECT_NEAR(rotation_trace(0.4)(0.0).imag(), std::sin(0.4), 1e-15);
}

TEST(BoundaryTrace, FitRecoversCoefficients) {
  const BoundaryTrace t({{-2, {0.1, 0.05}}, {1, 1.0}, {3, {0.0, -0.2}}});
  std::vector<cplx> samples(64);
  for (int k = 0; k < 64; ++k) samples[k] = t(2.0 * std::numbers::pi * k / 64);
  const auto fit = BoundaryTrace::from_samples(samples, 5);
  for (int n = -5; n <= 5; ++n) EXPECT_NEAR(std::abs(fit.coeff(n) - t.coeff(n)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(t.derivative(0.3) - (cplx(0, -2) * cplx(0.1, 0.05) * std::exp(cplx(0, -0.6)) +
                                            cplx(0, 1) * std::exp(cplx(0, 0.3)) +
                                            cplx(0, 3) * cplx(0, -0.2) * std::exp(cplx(0, 0.9)))),
              0.0, 1e-14);
}

TEST(Distortion, AffineMapHasConstantDilatation) {
  const auto grid = std::make_shared<const DiskGrid>(Domain::disk(), 12, 24);
  const cplx c{0.3, -0.1};
  const auto m = MappingField::sample(grid, [&](cplx z) { return z + c * std::conj(z); });
  const auto b = distortion(m);
  const double n = std::norm(c);
  for (std::size_t k = 0; k < grid->size(); ++k) {
    EXPECT_NEAR(std::abs(b.mu[k] - c), 0.0, 1e-12);
    EXPECT_NEAR(b.K[k], (1.0 + n) / (1.0 - n), 1e-12);
    EXPECT_NEAR(b.J[k], 1.0 - n, 1e-12);
  }
  EXPECT_EQ(b.degenerate_nodes, 0u);
  EXPECT_EQ(b.orientation_violations, 0u);
}

TEST(Distortion, ReflectionViolatesOrientation) {
  const auto grid = std::make_shared<const DiskGrid>(Domain::disk(), 6, 12);
  const auto m = MappingField::sample(grid, [](cplx z) { return std::conj(z); });
  EXPECT_EQ(distortion(m).orientation_violations, grid->size());
}

TEST(Distortion, VanishingFzIsDegenerateWithZeroMu) {
  const auto grid = std::make_shared<const DiskGrid>(Domain::disk(), 6, 12);
  const auto m = MappingField::sample(grid, [](cplx z) { return 0.5 * std::conj(z); });
  const auto b = distortion(m);
  EXPECT_EQ(b.degenerate_nodes, grid->size());
  for (const cplx mu : b.mu.values) EXPECT_EQ(mu, cplx(0.0));
}

TEST(MappingField, AssignRefreshesDerivatives) {
  const auto grid = std::make_shared<const DiskGrid>(Domain::annulus(0.5), 8, 16);
  auto m = MappingField::sample(grid, [](cplx z) { return z; });
  std::vector<cplx> v(grid->size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = 2.0 * grid->nodes()[k];
  m.assign(v);
  for (const cplx d : m.fz().values) EXPECT_NEAR(std::abs(d - 2.0), 0.0, 1e-12);
  for (const cplx d : m.forward().dz.values) EXPECT_NEAR(std::abs(d - 2.0), 0.0, 1e-12);
}

TEST(DistortionCsv, HasHeaderAndOneRowPerNode) {
  const auto grid = std::make_shared<const DiskGrid>(Domain::disk(), 4, 8);
  const auto m = MappingField::sample(grid, [](cplx z) { return z; });
  std::stringstream ss;
  write_distortion_csv(ss, distortion(m), *grid);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "r,theta,re_mu,im_mu,K,J");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  EXPECT_EQ(rows, 32);
}
