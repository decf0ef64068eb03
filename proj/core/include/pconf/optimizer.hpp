#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pconf/energy.hpp"

namespace pconf {

struct SolverConfig {
  int max_iters = 20000;
  double grad_tol = 1e-7;  // on sqrt(<G, H^{-1} G> / E), H the curvature-weighted preconditioner
  double step_init = 1.0;
  double armijo_c = 1e-4;
  double j_floor = 1e-3;  // accepted iterates keep min J > j_floor * median J of the start
  std::uint64_t seed = 1;  // residual panel
  int memory = 8;          // L-BFGS history length; 0 gives preconditioned gradient descent
  int panel_size = 20;

  void validate() const;
};

struct ContinuationSchedule {
  std::vector<double> p_values;

  void validate() const;
  bool ascending() const { return p_values.size() < 2 || p_values[1] > p_values[0]; }
};

struct SolveResult {
  explicit SolveResult(MappingField m) : mapping(std::move(m)) {}

  MappingField mapping;
  double p = 2.0;
  EnergyReport report;
  std::vector<ResidualReport> residual_panel;
  double max_relative_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double rel_grad = 0.0;
  double min_J = 0.0;
  bool pre_regularized = false;
  std::string diagnosis;
  std::vector<double> energy_history;
};

// Harmonic extension of the boundary data, mode by mode: r^{|n|} on the disk,
// a r^n + b r^{-n} (or a + b log r) on the annulus. Pinned rings take the exact
// extension when one is supplied.
MappingField harmonic_extension(const BoundaryData& boundary, std::shared_ptr<const DiskGrid> grid);

// Checks the degree of the traces, then returns the harmonic extension.
MappingField initial_guess(const BoundaryData& boundary, std::shared_ptr<const DiskGrid> grid);
MappingField initial_guess(const BoundaryTrace& boundary, std::shared_ptr<const DiskGrid> grid);

SolveResult minimize(const BoundaryData& boundary, double p, std::shared_ptr<const DiskGrid> grid,
                     const SolverConfig& config);
// The pinned rings of `start` are the boundary values and never move.
SolveResult minimize_from(const MappingField& start, double p, const SolverConfig& config);

std::vector<SolveResult> continuation(const BoundaryData& boundary, const ContinuationSchedule& schedule,
                                      std::shared_ptr<const DiskGrid> grid, const SolverConfig& config);

}  // namespace pconf
