#include <gtest/gtest.h>

#include <numbers>

#include "pconf/optimizer.hpp"
#include "test_support.hpp"

using namespace pconf;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const DiskGrid> make(Domain d, int nr, int nt) { return std::make_shared<const DiskGrid>(d, nr, nt); }

// A boundary that is far from conformal: e^{i theta} + 0.25 e^{-i theta}.
BoundaryData ellipse() { return boundary_from_trace(BoundaryTrace({{1, 1.0}, {-1, 0.25}})); }

}  // namespace

TEST(Config, ValidationRejectsNonsense) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.armijo_c = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.grad_tol = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW((ContinuationSchedule{{2.0, 3.0, 2.5}}.validate()), std::invalid_argument);
  EXPECT_THROW((ContinuationSchedule{{1.0, 2.0}}.validate()), std::invalid_argument);
  EXPECT_THROW((ContinuationSchedule{{}}.validate()), std::invalid_argument);
  EXPECT_FALSE((ContinuationSchedule{{2.0, 1.5}}.ascending()));
}

TEST(HarmonicExtension, ReproducesHarmonicPolynomials) {
  const BoundaryTrace t({{1, 1.0}, {2, 0.1}, {-1, 0.2}});
  const auto g = make(Domain::disk(), 16, 32);
  const auto m = initial_guess(t, g);
  for (std::size_t k = 0; k < g->size(); ++k) {
    const cplx z = g->nodes()[k];
    EXPECT_NEAR(std::abs(m.f()[k] - (z + 0.1 * z * z + 0.2 * std::conj(z))), 0.0, 1e-13);
  }
}

TEST(HarmonicExtension, AnnulusMatchesBothTraces) {
  BoundaryData d = boundary_from_trace(identity_trace());
  d.inner = BoundaryTrace({{1, 0.5}, {0, 0.01}});
  const auto g = make(Domain::annulus(0.5), 200, 16);
  const auto m = harmonic_extension(d, g);
  // the constant mode interpolates as a + b log r
  const double r0 = g->radius(0);
  const double w = std::log(r0) / std::log(0.5);
  EXPECT_NEAR(std::abs(m.f()[0] - (cplx(r0) + 0.01 * w)), 0.0, 1e-12);
}

TEST(InitialGuess, RejectsWrongDegree) {
  const auto g = make(Domain::disk(), 8, 16);
  EXPECT_THROW(initial_guess(BoundaryTrace({{-1, 1.0}}), g), std::exception);
}

TEST(Minimize, IdentityIsAFixedPoint) {
  const auto g = make(Domain::disk(), 16, 32);
  const auto r = minimize(boundary_from_trace(identity_trace()), 2.0, g, {});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.report.energy_p, kPi, 1e-12);
}

TEST(Minimize, RotationIsConformal) {
  const auto g = make(Domain::disk(), 16, 32);
  const auto r = minimize(boundary_from_trace(rotation_trace(0.7)), 3.0, g, {});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.report.energy_p, kPi, 1e-10);
}

TEST(Minimize, DecreasesEnergyAndKeepsBoundaryAndOrientation) {
  const auto g = make(Domain::disk(), 16, 32);
  const auto data = ellipse();
  const auto start = initial_guess(data, g);
  const auto r = minimize(data, 2.5, g, {});
  ASSERT_TRUE(r.converged) << r.diagnosis;
  EXPECT_LT(r.report.energy_p, energy_p(start, 2.5));
  for (std::size_t k = 1; k < r.energy_history.size(); ++k) EXPECT_LE(r.energy_history[k], r.energy_history[k - 1]);
  for (std::size_t k = 0; k < g->size(); ++k)
    if (g->is_pinned(k)) EXPECT_EQ(r.mapping.f()[k], start.f()[k]) << "pinned node " << k << " moved";
  EXPECT_GT(r.min_J, 0.0);
  EXPECT_EQ(r.report.orientation_violations, 0u);
  EXPECT_LE(r.rel_grad, SolverConfig{}.grad_tol);
}

TEST(Minimize, ReportsNonConvergence) {
  const auto g = make(Domain::disk(), 16, 32);
  SolverConfig c;
  c.max_iters = 2;
  const auto r = minimize(ellipse(), 4.0, g, c);
  EXPECT_FALSE(r.converged);
  EXPECT_FALSE(r.diagnosis.empty());
}

TEST(Minimize, IsDeterministic) {
  const auto g = make(Domain::annulus(0.5), 12, 24);
  BoundaryData d = ellipse();
  d.inner = BoundaryTrace({{1, 0.5}, {-1, 0.1}});
  const auto a = minimize(d, 2.0, g, {});
  const auto b = minimize(d, 2.0, g, {});
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(testing_support::max_abs_diff(a.mapping.f().values, b.mapping.f().values), 0.0);
}

TEST(Continuation, WarmStartsAreCheaperThanColdStarts) {
  const auto g = make(Domain::disk(), 16, 32);
  const auto data = ellipse();
  const auto steps = continuation(data, {{2.0, 2.2}}, g, {});
  ASSERT_EQ(steps.size(), 2u);
  const auto cold = minimize(data, 2.2, g, {});
  EXPECT_TRUE(steps[1].converged);
  EXPECT_LE(steps[1].iterations, cold.iterations);
  EXPECT_NEAR(steps[1].report.energy_p, cold.report.energy_p, 1e-8 * cold.report.energy_p);
}

TEST(Continuation, EnergyIsMonotoneInP) {
  // For any fixed map K >= 1, so E_p is nondecreasing in p; minimizing keeps the order.
  const auto g = make(Domain::disk(), 16, 32);
  const auto up = continuation(ellipse(), {{2.0, 3.0, 4.0}}, g, {});
  const auto down = continuation(ellipse(), {{2.0, 1.5, 1.2, 1.05}}, g, {});
  for (std::size_t k = 1; k < up.size(); ++k) EXPECT_GE(up[k].report.energy_p, up[k - 1].report.energy_p);
  for (std::size_t k = 1; k < down.size(); ++k) EXPECT_LE(down[k].report.energy_p, down[k - 1].report.energy_p);
}
