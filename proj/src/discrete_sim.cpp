#include "fluidlob/discrete_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fluidlob/errors.hpp"
#include "fluidlob/parallel.hpp"
#include "fluidlob/rng.hpp"
#include "fluidlob/routing.hpp"

namespace fluidlob {

std::vector<double> SimPath::q_scaled(std::size_t sample) const {
  std::vector<double> out(q[sample].size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(q[sample][i]) / static_cast<double>(n);
  }
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kCounterLimit = std::int64_t{1} << 62;

std::vector<double> sample_grid(double horizon, double dt) {
  std::vector<double> grid{0.0};
  if (horizon == 0.0) return grid;
  const auto k_max = static_cast<std::int64_t>(std::floor(horizon / dt + 1e-9));
  for (std::int64_t k = 1; k <= k_max; ++k) grid.push_back(static_cast<double>(k) * dt);
  if (std::abs(grid.back() - horizon) <= 1e-9 * horizon) {
    grid.back() = horizon;
  } else {
    grid.push_back(horizon);
  }
  return grid;
}

void bump(std::int64_t& counter, std::int64_t amount) {
  if (counter > kCounterLimit - amount) throw std::overflow_error("event counter overflow");
  counter += amount;
}

}  // namespace

SimPath simulate(const ModelConfig& cfg, const SimConfig& sim) {
  validate(cfg, RatePolicy::allow_zero);
  const std::size_t nx = cfg.size();
  if (sim.n < 1) throw ConfigError("n", "scaling parameter must be >= 1");
  if (!(sim.horizon >= 0.0) || !std::isfinite(sim.horizon)) {
    throw ConfigError("horizon", "must be finite and nonnegative");
  }
  if (!(sim.sample_dt > 0.0)) throw ConfigError("sample_dt", "must be positive");
  if (sim.horizon > 0.0 && sim.sample_dt > sim.horizon) {
    throw ConfigError("sample_dt", "must not exceed the horizon");
  }
  if (!(sim.epsilon >= 0.0)) throw ConfigError("epsilon", "must be nonnegative");
  if (sim.q0_scaled.size() != nx) throw ConfigError("q0", "length must equal n_exchanges");

  const double n = static_cast<double>(sim.n);
  SimPath path;
  path.n = sim.n;
  path.seed = sim.seed;
  path.epsilon = sim.epsilon;
  path.times = sample_grid(sim.horizon, sim.sample_dt);

  std::vector<std::int64_t> queue(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    if (!(sim.q0_scaled[i] >= 0.0)) throw ConfigError("q0", "components must be >= 0");
    queue[i] = std::llround(sim.q0_scaled[i] * n);
  }
  path.q0 = queue;
  auto raw_workload = [&] {
    double w = 0.0;
    for (std::size_t i = 0; i < nx; ++i) w += cfg.beta[i] * static_cast<double>(queue[i]);
    return w;
  };
  if (!(raw_workload() > 0.0)) throw ConfigError("q0", "initial workload must be positive");

  std::vector<std::int64_t> ded(nx, 0), opt(nx, 0), served(nx, 0);
  std::int64_t routed0 = 0;

  std::vector<RandomStream> ded_time, ded_size, mkt_size;
  for (std::size_t i = 0; i < nx; ++i) {
    ded_time.emplace_back(sim.seed, "dedicated", i);
    ded_size.emplace_back(sim.seed, "dedicated-size", i);
    mkt_size.emplace_back(sim.seed, "market-size", i);
  }
  RandomStream opt_time(sim.seed, "optimized-times");
  RandomStream types(sim.seed, "types");
  RandomStream opt_size(sim.seed, "optimized-size");
  RandomStream market(sim.seed, "market");

  std::vector<double> ded_rate(nx);
  std::vector<double> ded_next(nx, kInf);
  for (std::size_t i = 0; i < nx; ++i) {
    ded_rate[i] = n * cfg.lambda[i];
    if (ded_rate[i] > 0.0) ded_next[i] = ded_time[i].exponential(ded_rate[i]);
  }
  const double opt_rate = n * cfg.big_lambda;
  double opt_next = opt_rate > 0.0 ? opt_time.exponential(opt_rate) : kInf;
  const double mkt_rate = n * cfg.mu;
  double mkt_next = market.exponential(mkt_rate);

  std::size_t sample = 0;
  auto record = [&] {
    path.q.push_back(queue);
    path.dedicated.push_back(ded);
    path.optimized.push_back(opt);
    path.served.push_back(served);
    path.routed_to_market.push_back(routed0);
  };

  path.min_workload = raw_workload() / n;
  std::vector<double> delays(nx);

  for (;;) {
    // Next event: dedicated clocks by index, then optimized, then market.
    double t = kInf;
    int kind = -1;  // 0..nx-1 dedicated, nx optimized, nx+1 market
    for (std::size_t i = 0; i < nx; ++i) {
      if (ded_next[i] < t) {
        t = ded_next[i];
        kind = static_cast<int>(i);
      }
    }
    if (opt_next < t) {
      t = opt_next;
      kind = static_cast<int>(nx);
    }
    if (mkt_next < t) {
      t = mkt_next;
      kind = static_cast<int>(nx) + 1;
    }
    while (sample < path.times.size() && path.times[sample] < t) {
      record();
      ++sample;
    }
    if (sample == path.times.size() || t > sim.horizon) break;

    const auto k = static_cast<std::size_t>(kind);
    if (k < nx) {
      const std::int64_t b = cfg.dedicated_sizes[k].sample(ded_size[k]);
      bump(queue[k], b);
      bump(ded[k], b);
      ded_next[k] += ded_time[k].exponential(ded_rate[k]);
    } else if (k == nx) {
      const double gamma = cfg.type_dist.sample(types);
      const std::int64_t b = cfg.optimized_size.sample(opt_size);
      double w = raw_workload() / n;
      if (sim.epsilon > 0.0) w = std::max(w, sim.epsilon);
      for (std::size_t i = 0; i < nx; ++i) {
        delays[i] = queue[i] > 0 ? w / (cfg.mu * cfg.beta[i] * cfg.v) : 0.0;
      }
      const int dest = route_with_delays(cfg, gamma, delays);
      if (dest == 0) {
        bump(routed0, 1);
      } else {
        const auto d = static_cast<std::size_t>(dest - 1);
        bump(queue[d], b);
        bump(opt[d], b);
      }
      opt_next += opt_time.exponential(opt_rate);
    } else {
      // Candidate market order at rate n mu, kept with probability
      // sum_i mu_i(q) / mu = min(1, W / epsilon) (or 1{W > 0} untruncated).
      const double w_raw = raw_workload();
      const double u = market.uniform();
      const bool accept = sim.epsilon > 0.0 ? u * sim.epsilon < w_raw / n : w_raw > 0.0;
      if (accept) {
        const double target = market.uniform() * w_raw;
        double acc = 0.0;
        std::size_t dest = nx;
        for (std::size_t i = 0; i < nx; ++i) {
          if (queue[i] == 0) continue;
          acc += cfg.beta[i] * static_cast<double>(queue[i]);
          dest = i;
          if (target < acc) break;
        }
        const std::int64_t size = cfg.market_sizes[dest].sample(mkt_size[dest]);
        const std::int64_t take = std::min(size, queue[dest]);
        queue[dest] -= take;
        bump(served[dest], take);
      }
      mkt_next += market.exponential(mkt_rate);
    }
    ++path.event_count;
    path.min_workload = std::min(path.min_workload, raw_workload() / n);
  }
  while (sample < path.times.size()) {
    record();
    ++sample;
  }

  std::uint64_t fp = 0;
  auto mix = [&](const RandomStream& s) { fp = splitmix64(fp ^ s.fingerprint()); };
  for (std::size_t i = 0; i < nx; ++i) {
    mix(ded_time[i]);
    mix(ded_size[i]);
    mix(mkt_size[i]);
  }
  mix(opt_time);
  mix(types);
  mix(opt_size);
  mix(market);
  path.rng_fingerprint = fp;
  return path;
}

double sup_distance(const SimPath& path, const FluidTrajectory& traj) {
  if (path.times.empty() || traj.times.empty()) throw DomainError("sup_distance: empty input");
  const double tp = path.times.back();
  const double tf = traj.times.back();
  if (std::abs(tp - tf) > 1e-9 * std::max(1.0, tf)) {
    throw ConfigError("horizon", "path and trajectory horizons differ");
  }
  double dist = 0.0;
  for (std::size_t s = 0; s < path.samples(); ++s) {
    const std::vector<double> fluid = traj.at(path.times[s]);
    const std::vector<double> disc = path.q_scaled(s);
    for (std::size_t i = 0; i < disc.size(); ++i) {
      dist = std::max(dist, std::abs(disc[i] - fluid[i]));
    }
  }
  return dist;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

bool ConvergenceTable::medians_strictly_decreasing() const {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!(rows[k].median < rows[k - 1].median)) return false;
  }
  return true;
}

ConvergenceTable replicate(const ModelConfig& cfg, const SimConfig& sim_template,
                           const std::vector<std::int64_t>& n_values, int reps,
                           const IntegratorConfig& icfg) {
  if (reps < 1) throw ConfigError("reps", "must be >= 1");
  if (n_values.empty()) throw ConfigError("n_values", "must not be empty");
  const FluidTrajectory traj = integrate(cfg, sim_template.q0_scaled, sim_template.horizon, icfg);

  ConvergenceTable table;
  for (std::int64_t n : n_values) {
    ConvergenceRow row;
    row.n = n;
    row.distances.assign(static_cast<std::size_t>(reps), 0.0);
    for (int r = 0; r < reps; ++r) row.seeds.push_back(sim_template.seed + static_cast<std::uint64_t>(r));
    table.rows.push_back(std::move(row));
  }
  const std::size_t per_row = static_cast<std::size_t>(reps);
  parallel_for(table.rows.size() * per_row, [&](std::size_t task) {
    ConvergenceRow& row = table.rows[task / per_row];
    const std::size_t r = task % per_row;
    SimConfig sim = sim_template;
    sim.n = row.n;
    sim.seed = row.seeds[r];
    row.distances[r] = sup_distance(simulate(cfg, sim), traj);
  });
  for (ConvergenceRow& row : table.rows) {
    row.median = quantile(row.distances, 0.5);
    row.p90 = quantile(row.distances, 0.9);
  }
  return table;
}

}  // namespace fluidlob
