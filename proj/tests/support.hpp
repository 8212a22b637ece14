#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "fluidlob/model.hpp"

namespace testing_support {

using fluidlob::ModelConfig;
using fluidlob::TypeDistribution;

inline ModelConfig ref1() {
  return fluidlob::make_config({2, 1}, {0.3, 0.2}, 1.0, 1.0, -1.0, {1, 2},
                               TypeDistribution::exponential(1.0));
}

inline ModelConfig ref2() {
  return fluidlob::make_config({1, 1, 1}, {0.2, 0.2, 0.2}, 1.0, 1.0, -1.0, {1, 2, 3},
                               TypeDistribution::exponential(1.0));
}

// Brute-force routing argmax written independently of the library: every
// option's payoff is computed from the raw definitions.
inline int argmax_route(const ModelConfig& cfg, double gamma, const std::vector<double>& q) {
  double w = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) w += cfg.beta[i] * q[i];
  int best = 0;
  double best_payoff = gamma * cfg.rebate0;
  double best_rebate = cfg.rebate0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double delay = q[i] > 0.0 ? w / (cfg.mu * cfg.beta[i] * cfg.v) : 0.0;
    const double payoff = gamma * cfg.rebates[i] - delay;
    if (payoff > best_payoff || (payoff == best_payoff && cfg.rebates[i] > best_rebate)) {
      best = static_cast<int>(i) + 1;
      best_payoff = payoff;
      best_rebate = cfg.rebates[i];
    }
  }
  return best;
}

// Random config with deterministic unit sizes. Not filtered by assumptions.
inline ModelConfig random_config(std::mt19937_64& gen, int n_max = 4, bool half_normal = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick_n(1, n_max);
  const int n = pick_n(gen);
  std::vector<double> beta(n), lambda(n), rebates(n);
  for (int i = 0; i < n; ++i) beta[i] = 1.0 + 0.5 * u(gen);
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    r += 0.2 + u(gen);
    rebates[i] = r;
  }
  std::shuffle(rebates.begin(), rebates.end(), gen);
  const double mu = 0.5 + 1.5 * u(gen);
  const double big_lambda = 0.5 + 1.5 * u(gen);
  const double p = 0.02 + 0.28 * u(gen);
  double ded = mu - p * big_lambda;
  if (ded <= 0.05 * mu) ded = 0.05 * mu;
  double wsum = 0.0;
  for (int i = 0; i < n; ++i) wsum += (lambda[i] = 0.2 + u(gen));
  for (int i = 0; i < n; ++i) lambda[i] *= ded / wsum;
  const double r0 = -(0.5 + 1.5 * u(gen));
  TypeDistribution f = half_normal ? TypeDistribution::half_normal(0.5 + 1.5 * u(gen))
                                   : TypeDistribution::exponential(0.5 + 1.5 * u(gen));
  return fluidlob::make_config(beta, lambda, big_lambda, mu, r0, rebates, f);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testing_support
