#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fluidlob/equilibrium.hpp"
#include "fluidlob/fluid.hpp"

namespace fluidlob {

struct LocalTrial {
  double delta = 0.0;
  int direction = 0;
  std::vector<double> initial;
  double terminal_distance = 0.0;  ///< Euclidean distance to q* at the horizon
  double min_workload = 0.0;
  double kappa = 0.0;
  bool passed = false;
  std::string error;  ///< nonempty if the integration failed
};

struct LocalStabilityReport {
  std::vector<double> q_star;
  double horizon = 0.0;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::vector<LocalTrial> trials;
  bool all_pass = false;
};

/// Integrates from q* + delta * u for `directions` random unit vectors u
/// per delta and checks the terminal distance against `tolerance`.
LocalStabilityReport local_stability_experiment(const ModelConfig& cfg, const Equilibrium& eq,
                                                const std::vector<double>& deltas, double horizon,
                                                int directions, std::uint64_t seed = 0,
                                                double tolerance = 1e-6,
                                                IntegratorConfig icfg = {});

struct GlobalTrial {
  std::vector<double> initial;
  double w0 = 0.0;
  double terminal_distance = 0.0;
  bool workload_monotone = false;   ///< |W_t - W*| nonincreasing along the grid
  double max_gap_increase = 0.0;    ///< largest step-to-step growth of |W_t - W*|
  bool workload_crossed = false;    ///< W_t - W* changed sign beyond tolerance
  std::optional<double> tube_entry_time;  ///< first grid time with |W_t - W*| <= eps
  double min_workload = 0.0;
  double kappa = 0.0;
  bool passed = false;
  std::string error;
};

struct GlobalStabilityReport {
  std::vector<double> q_star;
  double w_star = 0.0;
  double tube_epsilon = 0.0;
  double horizon = 0.0;
  double box = 0.0;
  std::uint64_t seed = 0;
  std::vector<GlobalTrial> trials;
  bool all_pass = false;
};

struct GlobalStabilityOptions {
  double convergence_tol = 1e-4;
  double monotone_tol = 1e-9;
  double tube_fraction = 0.01;  ///< tube half-width as a fraction of W*
};

/// Equal-beta configs only: integrates from `n_inits` uniform draws in
/// (0, box]^N and checks convergence plus monotone approach of W_t to W*.
GlobalStabilityReport global_stability_experiment(const ModelConfig& cfg, int n_inits, double box,
                                                  double horizon, std::uint64_t seed,
                                                  const GlobalStabilityOptions& opts = {},
                                                  IntegratorConfig icfg = {});

/// Same checks for explicitly given initial states.
GlobalStabilityReport global_stability_from(const ModelConfig& cfg,
                                            const std::vector<std::vector<double>>& inits,
                                            double horizon,
                                            const GlobalStabilityOptions& opts = {},
                                            IntegratorConfig icfg = {});

}  // namespace fluidlob
