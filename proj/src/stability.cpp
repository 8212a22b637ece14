#include "fluidlob/stability.hpp"

#include <algorithm>
#include <cmath>

#include "fluidlob/errors.hpp"
#include "fluidlob/parallel.hpp"
#include "fluidlob/rng.hpp"

namespace fluidlob {

namespace {

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::vector<double> unit_direction(std::uint64_t seed, std::size_t index, std::size_t dim) {
  RandomStream rng(seed, "direction", index);
  std::vector<double> u(dim);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : u) {
      x = rng.standard_normal();
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : u) x /= norm;
  return u;
}

}  // namespace

LocalStabilityReport local_stability_experiment(const ModelConfig& cfg, const Equilibrium& eq,
                                                const std::vector<double>& deltas, double horizon,
                                                int directions, std::uint64_t seed,
                                                double tolerance, IntegratorConfig icfg) {
  if (directions < 1) throw ConfigError("directions", "must be >= 1");
  if (eq.q_star.size() != cfg.size()) throw ConfigError("q_star", "dimension mismatch");
  for (double d : deltas) {
    if (!(d >= 0.0)) throw ConfigError("deltas", "must be nonnegative");
  }
  if (icfg.record_every <= 1) icfg.record_every = 1000;

  LocalStabilityReport rep;
  rep.q_star = eq.q_star;
  rep.horizon = horizon;
  rep.tolerance = tolerance;
  rep.seed = seed;
  for (double d : deltas) {
    for (int k = 0; k < directions; ++k) {
      LocalTrial t;
      t.delta = d;
      t.direction = k;
      const std::vector<double> u = unit_direction(seed, static_cast<std::size_t>(k), cfg.size());
      t.initial = eq.q_star;
      for (std::size_t i = 0; i < u.size(); ++i) t.initial[i] += d * u[i];
      rep.trials.push_back(std::move(t));
    }
  }
  parallel_for(rep.trials.size(), [&](std::size_t k) {
    LocalTrial& t = rep.trials[k];
    if (std::any_of(t.initial.begin(), t.initial.end(), [](double x) { return x < 0.0; })) {
      t.error = "perturbed state leaves the nonnegative orthant";
      return;
    }
    try {
      const FluidTrajectory traj = integrate(cfg, t.initial, horizon, icfg);
      t.terminal_distance = euclidean(traj.terminal(), eq.q_star);
      t.min_workload = traj.min_workload;
      t.kappa = traj.kappa;
      t.passed = t.terminal_distance < tolerance;
    } catch (const std::exception& e) {
      t.error = e.what();
    }
  });
  rep.all_pass = std::all_of(rep.trials.begin(), rep.trials.end(),
                             [](const LocalTrial& t) { return t.passed; });
  return rep;
}

GlobalStabilityReport global_stability_from(const ModelConfig& cfg,
                                            const std::vector<std::vector<double>>& inits,
                                            double horizon, const GlobalStabilityOptions& opts,
                                            IntegratorConfig icfg) {
  if (!std::all_of(cfg.beta.begin(), cfg.beta.end(),
                   [&](double b) { return b == cfg.beta.front(); })) {
    throw ConfigError("/beta", "global stability experiment requires equal beta_i");
  }
  const Equilibrium eq = solve_equilibrium(cfg);
  if (icfg.record_every <= 1) icfg.record_every = 10;

  GlobalStabilityReport rep;
  rep.q_star = eq.q_star;
  rep.w_star = eq.w_star;
  rep.tube_epsilon = opts.tube_fraction * eq.w_star;
  rep.horizon = horizon;
  for (const auto& q0 : inits) {
    GlobalTrial t;
    t.initial = q0;
    t.w0 = workload(cfg, q0);
    rep.trials.push_back(std::move(t));
  }
  parallel_for(rep.trials.size(), [&](std::size_t k) {
    GlobalTrial& t = rep.trials[k];
    try {
      const FluidTrajectory traj = integrate(cfg, t.initial, horizon, icfg);
      t.terminal_distance = euclidean(traj.terminal(), eq.q_star);
      t.min_workload = traj.min_workload;
      t.kappa = traj.kappa;
      t.workload_monotone = true;
      const double side0 = traj.workload.front() - eq.w_star;
      double prev_gap = std::abs(side0);
      for (std::size_t s = 0; s < traj.workload.size(); ++s) {
        const double diff = traj.workload[s] - eq.w_star;
        const double gap = std::abs(diff);
        if (s > 0) {
          t.max_gap_increase = std::max(t.max_gap_increase, gap - prev_gap);
          if (gap > prev_gap + opts.monotone_tol) t.workload_monotone = false;
        }
        if ((side0 > opts.monotone_tol && diff < -opts.monotone_tol) ||
            (side0 < -opts.monotone_tol && diff > opts.monotone_tol)) {
          t.workload_crossed = true;
        }
        if (!t.tube_entry_time && gap <= rep.tube_epsilon) t.tube_entry_time = traj.times[s];
        prev_gap = gap;
      }
      t.passed = t.terminal_distance < opts.convergence_tol && t.workload_monotone;
    } catch (const std::exception& e) {
      t.error = e.what();
    }
  });
  rep.all_pass = std::all_of(rep.trials.begin(), rep.trials.end(),
                             [](const GlobalTrial& t) { return t.passed; });
  return rep;
}

GlobalStabilityReport global_stability_experiment(const ModelConfig& cfg, int n_inits, double box,
                                                  double horizon, std::uint64_t seed,
                                                  const GlobalStabilityOptions& opts,
                                                  IntegratorConfig icfg) {
  if (n_inits < 1) throw ConfigError("n_inits", "must be >= 1");
  if (!(box > 0.0)) throw ConfigError("box", "must be positive");
  std::vector<std::vector<double>> inits;
  RandomStream rng(seed, "global-inits");
  while (inits.size() < static_cast<std::size_t>(n_inits)) {
    std::vector<double> q(cfg.size());
    for (double& x : q) x = box * rng.uniform_pos();
    if (workload(cfg, q) > 0.0) inits.push_back(std::move(q));
  }
  GlobalStabilityReport rep = global_stability_from(cfg, inits, horizon, opts, icfg);
  rep.box = box;
  rep.seed = seed;
  return rep;
}

}  // namespace fluidlob
