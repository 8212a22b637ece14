#include "fluidlob/routing.hpp"

#include <algorithm>
#include <cmath>

#include "fluidlob/errors.hpp"

namespace fluidlob {

QueueState QueueState::make(const ModelConfig& cfg, std::vector<double> q) {
  if (q.size() != cfg.size()) throw ConfigError("q", "length must equal n_exchanges");
  for (double x : q) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("queue lengths must be finite and >= 0");
  }
  QueueState s;
  s.workload = fluidlob::workload(cfg, q);
  s.q = std::move(q);
  return s;
}

std::vector<double> market_rates(const ModelConfig& cfg, const QueueState& state,
                                 double epsilon) {
  std::vector<double> rates(cfg.size(), 0.0);
  double denom = state.workload;
  if (epsilon > 0.0) {
    denom = std::max(denom, epsilon);
  } else if (!(denom > 0.0)) {
    return rates;
  }
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    rates[i] = cfg.mu * cfg.beta[i] * state.q[i] / denom;
  }
  return rates;
}

std::vector<double> expected_delays(const ModelConfig& cfg, const QueueState& state) {
  std::vector<double> delays(cfg.size(), 0.0);
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    if (state.q[i] > 0.0) delays[i] = state.workload / (cfg.mu * cfg.beta[i] * cfg.v);
  }
  return delays;
}

int route_with_delays(const ModelConfig& cfg, double gamma, const std::vector<double>& delays) {
  // Visit exchanges by decreasing rebate and move only on a strictly larger
  // payoff, so ties resolve to the highest rebate. The market order has the
  // lowest rebate of all and is compared last.
  int best = 0;
  double best_payoff = gamma * cfg.rebate0;
  double best_rebate = cfg.rebate0;
  bool have_exchange = false;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const double payoff = gamma * cfg.rebates[i] - delays[i];
    const bool better = !have_exchange || payoff > best_payoff ||
                        (payoff == best_payoff && cfg.rebates[i] > best_rebate);
    if (better) {
      best = static_cast<int>(i) + 1;
      best_payoff = payoff;
      best_rebate = cfg.rebates[i];
      have_exchange = true;
    }
  }
  if (gamma * cfg.rebate0 > best_payoff) return 0;
  return best;
}

int route(const ModelConfig& cfg, double gamma, const QueueState& state) {
  if (!(gamma > 0.0)) throw DomainError("route: type gamma must be positive");
  if (!(state.workload > 0.0)) throw DomainError("route: workload beta.q must be positive");
  return route_with_delays(cfg, gamma, expected_delays(cfg, state));
}

int route_by_bands(const RoutingBands& bands, double gamma, double w) {
  const double x = gamma / w;
  for (std::size_t i = 0; i < bands.a_minus.size(); ++i) {
    if (bands.empty_band[i]) continue;
    if (x >= bands.a_minus[i] && x <= bands.a_plus[i]) return static_cast<int>(i) + 1;
  }
  return 0;
}

namespace {

// F(hi) - F(lo) for lo <= hi, taking the complement in the upper tail to
// keep relative accuracy when both arguments are large.
double band_mass(const TypeDistribution& f, double lo, double hi) {
  const double f_lo = f.cdf(lo);
  if (f_lo <= 0.5) return f.cdf(hi) - f_lo;
  if (const auto* e = std::get_if<TypeDistribution::Exponential>(&f.variant())) {
    const double t_hi = std::isinf(hi) ? 0.0 : std::exp(-e->rate * hi);
    return std::exp(-e->rate * lo) - t_hi;
  }
  if (const auto* h = std::get_if<TypeDistribution::HalfNormal>(&f.variant())) {
    const double k = 1.0 / (h->sigma * std::sqrt(2.0));
    const double t_hi = std::isinf(hi) ? 0.0 : std::erfc(hi * k);
    return std::erfc(lo * k) - t_hi;
  }
  return (1.0 - f_lo) - (1.0 - f.cdf(hi));
}

}  // namespace

std::vector<double> chi(const ModelConfig& cfg, const RoutingBands& bands, double w,
                        double epsilon) {
  if (epsilon > 0.0) {
    if (!(w >= 0.0)) throw DomainError("chi: workload must be nonnegative");
    w = std::max(w, epsilon);
  } else if (!(w > 0.0)) {
    throw DomainError("chi: workload must be positive when epsilon = 0");
  }
  std::vector<double> out(cfg.size() + 1, 0.0);
  double routed = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    if (bands.empty_band[i]) continue;
    const double lo = w * bands.a_minus[i];
    const double hi = std::isinf(bands.a_plus[i]) ? bands.a_plus[i] : w * bands.a_plus[i];
    out[i + 1] = std::max(0.0, band_mass(cfg.type_dist, lo, hi));
    routed += out[i + 1];
  }
  out[0] = 1.0 - routed;
  return out;
}

std::vector<double> chi(const ModelConfig& cfg, double w, double epsilon) {
  return chi(cfg, compute_bands(cfg), w, epsilon);
}

std::vector<double> chi_derivative(const ModelConfig& cfg, const RoutingBands& bands, double w) {
  if (!(w > 0.0)) throw DomainError("chi_derivative: workload must be positive");
  std::vector<double> out(cfg.size(), 0.0);
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    if (bands.empty_band[i]) continue;
    const double am = bands.a_minus[i];
    const double ap = bands.a_plus[i];
    const double upper = std::isinf(ap) ? 0.0 : ap * cfg.type_dist.density(w * ap);
    out[i] = upper - am * cfg.type_dist.density(w * am);
  }
  return out;
}

std::vector<double> chi_derivative(const ModelConfig& cfg, double w) {
  return chi_derivative(cfg, compute_bands(cfg), w);
}

Eigen::MatrixXd mu_gradient(const ModelConfig& cfg, const QueueState& state) {
  if (!(state.workload > 0.0)) throw DomainError("mu_gradient: workload must be positive");
  const auto n = static_cast<Eigen::Index>(cfg.size());
  const double w = state.workload;
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const double diag = (i == j) ? w : 0.0;
      g(i, j) = cfg.mu * cfg.beta[ui] * (diag - state.q[ui] * cfg.beta[uj]) / (w * w);
    }
  }
  return g;
}

}  // namespace fluidlob
