#include "fluidlob/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fluidlob/equilibrium.hpp"
#include "fluidlob/errors.hpp"
#include "fluidlob/routing.hpp"

namespace fluidlob {

std::vector<double> fluid_rhs(const ModelConfig& cfg, const RoutingBands& bands,
                              const std::vector<double>& q) {
  const double w = workload(cfg, q);
  if (!(w > 0.0)) throw DomainError("fluid_rhs: workload beta.q must be positive");
  const std::vector<double> frac = chi(cfg, bands, w);
  std::vector<double> out(cfg.size());
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const double service = cfg.v * cfg.mu * cfg.beta[i] * q[i] / w;
    out[i] = cfg.b_dedicated[i] * cfg.lambda[i] + cfg.b_optimized * cfg.big_lambda * frac[i + 1] -
             service;
  }
  return out;
}

std::vector<double> fluid_rhs(const ModelConfig& cfg, const std::vector<double>& q) {
  return fluid_rhs(cfg, compute_bands(cfg), q);
}

namespace {

bool equal_beta(const ModelConfig& cfg) {
  return std::all_of(cfg.beta.begin(), cfg.beta.end(),
                     [&](double b) { return b == cfg.beta.front(); });
}

double mass_rate(const ModelConfig& cfg, const RoutingBands& bands, double w) {
  double dedicated = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i) dedicated += cfg.b_dedicated[i] * cfg.lambda[i];
  double routed = 0.0;
  if (cfg.big_lambda != 0.0) routed = 1.0 - chi(cfg, bands, w)[0];
  return dedicated + cfg.b_optimized * cfg.big_lambda * routed - cfg.v * cfg.mu;
}

std::size_t step_count(double horizon, double dt) {
  if (horizon == 0.0) return 0;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9)));
}

using State = std::vector<double>;

State axpy(const State& y, double a, const State& k) {
  State out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * k[i];
  return out;
}

template <class Rhs>
State rk4_step(const Rhs& f, const State& y, double h) {
  const State k1 = f(y);
  const State k2 = f(axpy(y, 0.5 * h, k1));
  const State k3 = f(axpy(y, 0.5 * h, k2));
  const State k4 = f(axpy(y, h, k3));
  State out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

}  // namespace

double workload_rhs(const ModelConfig& cfg, double w) {
  if (!equal_beta(cfg)) throw ConfigError("/beta", "workload_rhs requires equal beta_i");
  if (!(w > 0.0)) throw DomainError("workload_rhs: workload must be positive");
  return mass_rate(cfg, compute_bands(cfg), w);
}

std::vector<double> FluidTrajectory::at(double t) const {
  if (times.empty()) throw DomainError("empty trajectory");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times.begin());
  const double s = (t - times[k - 1]) / (times[k] - times[k - 1]);
  std::vector<double> out(states[k].size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = states[k - 1][i] + s * (states[k][i] - states[k - 1][i]);
  }
  return out;
}

FluidTrajectory integrate(const ModelConfig& cfg, const std::vector<double>& q0, double horizon,
                          const IntegratorConfig& icfg) {
  validate(cfg, RatePolicy::allow_zero);
  if (q0.size() != cfg.size()) throw ConfigError("q0", "length must equal n_exchanges");
  for (double x : q0) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("q0", "components must be >= 0");
  }
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("horizon", "must be finite and nonnegative");
  }
  const double w0 = workload(cfg, q0);
  if (!(w0 > 0.0)) throw ConfigError("q0", "initial workload beta.q0 must be positive");
  const double dt = icfg.dt > 0.0 ? icfg.dt : 1e-3 / cfg.mu;
  if (!(icfg.workload_floor_factor > 0.0 && icfg.workload_floor_factor < 1.0)) {
    throw ConfigError("workload_floor_factor", "must lie in (0, 1)");
  }
  const std::size_t stride = std::max<std::size_t>(1, icfg.record_every);

  FluidTrajectory traj;
  if (icfg.kappa) {
    traj.kappa = *icfg.kappa;
  } else {
    try {
      traj.kappa = compute_kappa(cfg, w0, solve_equilibrium(cfg).w_star);
    } catch (const std::exception&) {
      // No equilibrium: fall back to the initial-workload part of the bound.
      const auto [lo, hi] = std::minmax_element(cfg.beta.begin(), cfg.beta.end());
      traj.kappa = (*lo / *hi) * w0;
    }
  }
  const double floor = icfg.workload_floor_factor * traj.kappa;

  const RoutingBands bands = compute_bands(cfg);
  auto rhs = [&](const State& y) { return fluid_rhs(cfg, bands, y); };

  const std::size_t steps = step_count(horizon, dt);
  const double h = steps == 0 ? dt : horizon / static_cast<double>(steps);
  traj.dt = h;

  State y = q0;
  traj.min_workload = w0;
  auto record = [&](std::size_t k) {
    traj.times.push_back(static_cast<double>(k) * h);
    traj.states.push_back(y);
    traj.workload.push_back(workload(cfg, y));
  };
  record(0);

  for (std::size_t k = 1; k <= steps; ++k) {
    State next = rk4_step(rhs, y, h);
    if (icfg.refine_check) {
      const State half = rk4_step(rhs, rk4_step(rhs, y, 0.5 * h), 0.5 * h);
      double diff = 0.0;
      double scale = 1.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        diff = std::max(diff, std::abs(next[i] - half[i]));
        scale = std::max(scale, std::abs(next[i]));
      }
      traj.stats.max_refine_error = std::max(traj.stats.max_refine_error, diff);
      if (diff > 1e-6 * scale) {
        throw StepInstabilityError("half-step discrepancy " + std::to_string(diff) +
                                   " at t=" + std::to_string(static_cast<double>(k) * h));
      }
    }
    for (double& x : next) {
      if (x < 0.0) {
        if (x < -1e-12) {
          throw StepInstabilityError("negative queue length " + std::to_string(x) +
                                     " at t=" + std::to_string(static_cast<double>(k) * h));
        }
        x = 0.0;
      }
    }
    y = std::move(next);
    const double w = workload(cfg, y);
    traj.min_workload = std::min(traj.min_workload, w);
    if (w < floor) {
      throw SingularityError("workload " + std::to_string(w) + " fell below floor " +
                             std::to_string(floor) + " at t=" +
                             std::to_string(static_cast<double>(k) * h));
    }
    if (k % stride == 0 || k == steps) record(k);
  }
  traj.stats.steps = steps;
  return traj;
}

std::vector<double> integrate_workload(const ModelConfig& cfg, double w0, double horizon,
                                       double dt) {
  validate(cfg, RatePolicy::allow_zero);
  if (!equal_beta(cfg)) throw ConfigError("/beta", "integrate_workload requires equal beta_i");
  if (!(w0 > 0.0)) throw ConfigError("w0", "initial workload must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
  const RoutingBands bands = compute_bands(cfg);
  const double beta = cfg.beta.front();
  auto rhs = [&](const State& y) { return State{beta * mass_rate(cfg, bands, y[0])}; };
  const std::size_t steps = step_count(horizon, dt);
  const double h = steps == 0 ? dt : horizon / static_cast<double>(steps);
  std::vector<double> out{w0};
  State y{w0};
  for (std::size_t k = 1; k <= steps; ++k) {
    y = rk4_step(rhs, y, h);
    out.push_back(y[0]);
  }
  return out;
}

}  // namespace fluidlob
