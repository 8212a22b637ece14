#pragma once

#include <cstdint>
#include <vector>

#include "fluidlob/fluid.hpp"
#include "fluidlob/model.hpp"

namespace fluidlob {

/// Parameters of one run of the n-th rescaled system.
struct SimConfig {
  std::int64_t n = 1;         ///< scaling parameter: rates times n, sizes over n
  double horizon = 0.0;
  double sample_dt = 0.1;
  std::uint64_t seed = 0;
  double epsilon = 0.0;       ///< market-rate truncation, 0 = off
  std::vector<double> q0_scaled;
};

/// Sampled path of the rescaled queue lengths with cumulative event counts.
///
/// Counts are stored unscaled (integer order units); the *_scaled accessors
/// divide by n. At every sample q = q0 + dedicated + optimized - served holds
/// exactly in integer arithmetic.
struct SimPath {
  std::int64_t n = 1;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  std::vector<double> times;
  std::vector<std::int64_t> q0;
  std::vector<std::vector<std::int64_t>> q;          ///< [sample][exchange]
  std::vector<std::vector<std::int64_t>> dedicated;  ///< cumulative A^{d,i} volume
  std::vector<std::vector<std::int64_t>> optimized;  ///< cumulative A^{o,i} volume
  std::vector<std::vector<std::int64_t>> served;     ///< cumulative D^i served volume
  std::vector<std::int64_t> routed_to_market;        ///< optimized orders with i* = 0
  /// Smallest scaled workload over the whole run (event level, not samples).
  double min_workload = 0.0;
  std::uint64_t event_count = 0;
  std::uint64_t rng_fingerprint = 0;

  std::size_t samples() const { return times.size(); }
  std::vector<double> q_scaled(std::size_t sample) const;
  bool operator==(const SimPath&) const = default;
};

/// Exact event-driven simulation of the rescaled Markov chain.
///
/// Every event class runs on its own constant-rate Poisson clock and its own
/// random substream: dedicated arrivals at i (rate n lambda_i), optimized
/// arrivals (rate n Lambda) and candidate market orders (rate n mu, thinned
/// to the state-dependent rate). Clock times therefore never depend on the
/// state, which is what makes truncated and untruncated runs couple exactly.
SimPath simulate(const ModelConfig& cfg, const SimConfig& sim);

/// Max over sample times of the max-norm gap between the scaled path and
/// the linearly interpolated fluid trajectory.
double sup_distance(const SimPath& path, const FluidTrajectory& traj);

struct ConvergenceRow {
  std::int64_t n = 0;
  std::vector<double> distances;  ///< one per replicate, in replicate order
  std::vector<std::uint64_t> seeds;
  double median = 0.0;
  double p90 = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  bool medians_strictly_decreasing() const;
};

/// Runs `reps` replicates per n with seeds seed_base + r, compares each to a
/// single fluid integration, and summarises the sup-distances. Replicates may
/// run concurrently (see max_threads()).
ConvergenceTable replicate(const ModelConfig& cfg, const SimConfig& sim_template,
                           const std::vector<std::int64_t>& n_values, int reps,
                           const IntegratorConfig& icfg = {});

/// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> values, double p);

}  // namespace fluidlob
