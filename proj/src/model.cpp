#include "fluidlob/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fluidlob/equilibrium.hpp"
#include "fluidlob/errors.hpp"

namespace fluidlob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

void check_mean(const SizeDistribution& d, double mean, const std::string& key) {
  const double m = d.mean();
  require(std::abs(m - mean) <= 1e-12 * std::max(1.0, std::abs(mean)), key,
          "size distribution mean does not match the configured mean");
}

}  // namespace

void validate(const ModelConfig& cfg, RatePolicy rates) {
  require(cfg.n_exchanges >= 1, "/n_exchanges", "must be a positive integer");
  const std::size_t n = cfg.size();
  require(cfg.beta.size() == n, "/beta", "length must equal n_exchanges");
  require(cfg.lambda.size() == n, "/lambda", "length must equal n_exchanges");
  require(cfg.rebates.size() == n, "/rebates", "length must equal n_exchanges");
  require(cfg.b_dedicated.size() == n, "/b_dedicated", "length must equal n_exchanges");
  require(cfg.market_sizes.size() == n, "/size_dists/market", "needs one entry per exchange");
  require(cfg.dedicated_sizes.size() == n, "/size_dists/dedicated",
          "needs one entry per exchange");

  const bool strict = rates == RatePolicy::strict;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string idx = "/" + std::to_string(i);
    require(finite_positive(cfg.beta[i]), "/beta" + idx, "must be positive");
    if (strict) {
      require(finite_positive(cfg.lambda[i]), "/lambda" + idx, "must be positive");
    } else {
      require(std::isfinite(cfg.lambda[i]) && cfg.lambda[i] >= 0.0, "/lambda" + idx,
              "must be nonnegative");
    }
    require(std::isfinite(cfg.rebates[i]) && cfg.rebates[i] >= 0.0, "/rebates" + idx,
            "must be nonnegative");
    for (std::size_t j = 0; j < i; ++j) {
      require(cfg.rebates[i] != cfg.rebates[j], "/rebates" + idx, "rebates must be pairwise distinct");
    }
    require(finite_positive(cfg.b_dedicated[i]), "/b_dedicated" + idx, "must be positive");
    check_mean(cfg.market_sizes[i], cfg.v, "/size_dists/market" + idx);
    check_mean(cfg.dedicated_sizes[i], cfg.b_dedicated[i], "/size_dists/dedicated" + idx);
  }
  if (strict) {
    require(finite_positive(cfg.big_lambda), "/big_lambda", "must be positive");
  } else {
    require(std::isfinite(cfg.big_lambda) && cfg.big_lambda >= 0.0, "/big_lambda",
            "must be nonnegative");
  }
  require(finite_positive(cfg.mu), "/mu", "must be positive");
  require(std::isfinite(cfg.rebate0) && cfg.rebate0 < 0.0, "/rebate0", "must be negative");
  require(finite_positive(cfg.v), "/v", "must be positive");
  require(finite_positive(cfg.b_optimized), "/b_optimized", "must be positive");
  check_mean(cfg.optimized_size, cfg.b_optimized, "/size_dists/optimized");
}

ModelConfig make_config(std::vector<double> beta, std::vector<double> lambda, double big_lambda,
                        double mu, double rebate0, std::vector<double> rebates,
                        TypeDistribution type_dist, double v, std::vector<double> b_dedicated,
                        double b_optimized) {
  ModelConfig cfg;
  cfg.n_exchanges = static_cast<int>(beta.size());
  if (b_dedicated.empty()) b_dedicated.assign(beta.size(), 1.0);
  auto det = [](double mean, const char* key) {
    if (mean < 1.0 || std::floor(mean) != mean) {
      throw ConfigError(key, "default sizes need an integer mean >= 1");
    }
    return SizeDistribution::deterministic(static_cast<std::int64_t>(mean));
  };
  for (double b : b_dedicated) cfg.dedicated_sizes.push_back(det(b, "/b_dedicated"));
  cfg.market_sizes.assign(beta.size(), det(v, "/v"));
  cfg.optimized_size = det(b_optimized, "/b_optimized");
  cfg.beta = std::move(beta);
  cfg.lambda = std::move(lambda);
  cfg.big_lambda = big_lambda;
  cfg.mu = mu;
  cfg.rebate0 = rebate0;
  cfg.rebates = std::move(rebates);
  cfg.type_dist = std::move(type_dist);
  cfg.v = v;
  cfg.b_dedicated = std::move(b_dedicated);
  cfg.b_optimized = b_optimized;
  return cfg;
}

double workload(const ModelConfig& cfg, const std::vector<double>& q) {
  double w = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i) w += cfg.beta[i] * q[i];
  return w;
}

bool RoutingBands::any_empty() const {
  return std::any_of(empty_band.begin(), empty_band.end(), [](bool b) { return b; });
}

RoutingBands compute_bands(const ModelConfig& cfg) {
  const std::size_t n = cfg.size();
  RoutingBands bands;
  bands.a_minus.assign(n, -kInf);
  bands.a_plus.assign(n, kInf);
  bands.empty_band.assign(n, false);

  auto inv_rate = [&](std::size_t i) { return 1.0 / (cfg.mu * cfg.beta[i] * cfg.v); };

  for (std::size_t i = 0; i < n; ++i) {
    // Competitor 0 (market order): zero delay, rebate r_0 < r_i.
    bands.a_minus[i] = inv_rate(i) / (cfg.rebates[i] - cfg.rebate0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (cfg.rebates[j] < cfg.rebates[i]) {
        const double a = (inv_rate(i) - inv_rate(j)) / (cfg.rebates[i] - cfg.rebates[j]);
        bands.a_minus[i] = std::max(bands.a_minus[i], a);
      } else {
        const double a = (inv_rate(j) - inv_rate(i)) / (cfg.rebates[j] - cfg.rebates[i]);
        bands.a_plus[i] = std::min(bands.a_plus[i], a);
      }
    }
    bands.empty_band[i] = bands.a_plus[i] < bands.a_minus[i];
  }
  bands.a_min_global = *std::min_element(bands.a_minus.begin(), bands.a_minus.end());
  return bands;
}

double compute_kappa(const ModelConfig& cfg, double w0, double w_star) {
  if (!(w0 > 0.0)) throw ConfigError("w0", "initial workload must be positive");
  if (!(w_star > 0.0)) throw ConfigError("w_star", "equilibrium workload must be positive");
  const auto [lo, hi] = std::minmax_element(cfg.beta.begin(), cfg.beta.end());
  return (*lo / *hi) * std::min(w0, w_star);
}

AssumptionReport check_assumptions(const ModelConfig& cfg, const std::vector<double>& q0,
                                   const AssumptionGridOptions& grid) {
  validate(cfg);
  if (q0.size() != cfg.size()) throw ConfigError("q0", "length must equal n_exchanges");
  AssumptionReport rep;
  rep.w0 = workload(cfg, q0);
  if (!(rep.w0 > 0.0)) throw ConfigError("q0", "initial workload beta.q0 must be positive");

  // (ii): evaluated exactly as written.
  double dedicated = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i) dedicated += cfg.b_dedicated[i] * cfg.lambda[i];
  rep.cond_ii_dedicated = dedicated;
  rep.cond_ii_service = cfg.v * cfg.mu;
  rep.cond_ii_total = dedicated + cfg.b_optimized * cfg.big_lambda;
  rep.cond_ii_holds = rep.cond_ii_dedicated < rep.cond_ii_service &&
                      rep.cond_ii_service < rep.cond_ii_total;

  // (iv)
  const RoutingBands bands = compute_bands(cfg);
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    if (bands.empty_band[i]) rep.empty_band_exchanges.push_back(static_cast<int>(i + 1));
  }
  rep.cond_iv_holds = rep.empty_band_exchanges.empty();

  try {
    rep.w_star = solve_equilibrium(cfg).w_star;
  } catch (const std::exception& e) {
    rep.failure = e.what();
    return rep;
  }
  rep.kappa = compute_kappa(cfg, rep.w0, rep.w_star);

  // (i): strict decrease of gamma*f(gamma) on a geometric grid.
  const std::size_t pts = std::max<std::size_t>(grid.points, 2);
  const double lo = bands.a_min_global * rep.kappa;
  const double hi = lo * grid.span;
  rep.cond_i_grid_lo = lo;
  rep.cond_i_grid_hi = hi;
  rep.cond_i_grid_points = pts;
  rep.cond_i_holds = true;
  const double ratio = std::pow(grid.span, 1.0 / static_cast<double>(pts - 1));
  double gamma = lo;
  // Compared in log space so tail underflow cannot fake a plateau.
  double prev = std::log(gamma) + cfg.type_dist.log_density(gamma);
  for (std::size_t k = 1; k < pts; ++k) {
    gamma = (k + 1 == pts) ? hi : gamma * ratio;
    const double cur = std::log(gamma) + cfg.type_dist.log_density(gamma);
    if (!(cur < prev)) {
      rep.cond_i_holds = false;
      rep.cond_i_first_violation = gamma;
      break;
    }
    prev = cur;
  }
  rep.complete = true;
  return rep;
}

}  // namespace fluidlob
