#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fluidlob/model.hpp"

namespace fluidlob {

/// Fluid vector field Psi_i(q) = b^{d,i} lambda_i + b^o Lambda chi_i(W) - v mu_i(q).
std::vector<double> fluid_rhs(const ModelConfig& cfg, const RoutingBands& bands,
                              const std::vector<double>& q);
std::vector<double> fluid_rhs(const ModelConfig& cfg, const std::vector<double>& q);

/// Total-mass rate sum_i b^{d,i} lambda_i + b^o Lambda (1 - chi_0(w)) - v mu.
/// A closed scalar field only when all beta_i are equal; the workload then
/// evolves as dW/dt = beta * workload_rhs(W).
double workload_rhs(const ModelConfig& cfg, double w);

struct IntegratorConfig {
  double dt = 0.0;                      ///< 0 selects 1e-3 / mu
  bool refine_check = false;            ///< compare each step with two half-steps
  double workload_floor_factor = 0.5;   ///< abort below this fraction of kappa
  std::size_t record_every = 1;         ///< store every k-th step (last step always stored)
  /// Overrides the equilibrium-based kappa used for the floor.
  std::optional<double> kappa;
};

struct IntegratorStats {
  std::size_t steps = 0;
  double max_refine_error = 0.0;  ///< max half-step discrepancy (0 if unchecked)
};

struct FluidTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;  ///< one row per recorded time
  std::vector<double> workload;
  double min_workload = 0.0;  ///< over every integration step, not just recorded rows
  double kappa = 0.0;         ///< lower bound the run was checked against
  double dt = 0.0;
  IntegratorStats stats;

  std::size_t n_exchanges() const { return states.empty() ? 0 : states.front().size(); }
  const std::vector<double>& terminal() const { return states.back(); }
  /// Linear interpolation of the state at time t within [0, T].
  std::vector<double> at(double t) const;
};

/// Classical fourth-order Runge-Kutta on a fixed grid.
///
/// Throws SingularityError if W falls below workload_floor_factor * kappa
/// and StepInstabilityError on a failed refine check or a negative
/// component below -1e-12.
FluidTrajectory integrate(const ModelConfig& cfg, const std::vector<double>& q0, double horizon,
                          const IntegratorConfig& icfg = {});

/// Scalar RK4 of dW/dt = beta * workload_rhs(W) for equal-beta configs.
/// Returns W on the same grid integrate() would use with record_every = 1.
std::vector<double> integrate_workload(const ModelConfig& cfg, double w0, double horizon,
                                       double dt);

}  // namespace fluidlob
