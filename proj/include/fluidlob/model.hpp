#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fluidlob/distributions.hpp"

namespace fluidlob {

/// Model primitives of the N-exchange routing system.
///
/// Means (`v`, `b_dedicated`, `b_optimized`) must agree with the means of the
/// corresponding size distributions; the fluid limit sees only the means.
struct ModelConfig {
  int n_exchanges = 0;
  std::vector<double> beta;    ///< market-order attraction weights
  std::vector<double> lambda;  ///< dedicated limit-order rates
  double big_lambda = 0.0;     ///< optimized limit-order rate
  double mu = 0.0;             ///< total market-order rate
  double rebate0 = 0.0;        ///< market-order rebate (a fee, < 0)
  std::vector<double> rebates; ///< limit-order rebates, pairwise distinct
  double v = 1.0;
  std::vector<double> b_dedicated;
  double b_optimized = 1.0;
  TypeDistribution type_dist = TypeDistribution::exponential(1.0);
  std::vector<SizeDistribution> market_sizes;     ///< V^i, one per exchange
  std::vector<SizeDistribution> dedicated_sizes;  ///< B^{d,i}, one per exchange
  SizeDistribution optimized_size = SizeDistribution::deterministic(1);

  std::size_t size() const { return static_cast<std::size_t>(n_exchanges); }
  bool operator==(const ModelConfig&) const = default;
};

enum class RatePolicy {
  strict,      ///< lambda_i > 0 and Lambda > 0
  allow_zero,  ///< lambda_i >= 0 and Lambda >= 0 (pure-service studies)
};

/// Throws ConfigError naming the first violated field.
void validate(const ModelConfig& cfg, RatePolicy rates = RatePolicy::strict);

/// Builds a config whose size distributions are deterministic at the given
/// means. Means must be positive integers.
ModelConfig make_config(std::vector<double> beta, std::vector<double> lambda, double big_lambda,
                        double mu, double rebate0, std::vector<double> rebates,
                        TypeDistribution type_dist, double v = 1.0,
                        std::vector<double> b_dedicated = {}, double b_optimized = 1.0);

double workload(const ModelConfig& cfg, const std::vector<double>& q);

/// Routing band edges: types in W*[a_minus[i], a_plus[i]] choose exchange i.
struct RoutingBands {
  std::vector<double> a_minus;
  std::vector<double> a_plus;  ///< +inf for the top-rebate exchange
  double a_min_global = 0.0;
  std::vector<bool> empty_band;

  bool any_empty() const;
};

RoutingBands compute_bands(const ModelConfig& cfg);

/// beta_min / beta_max * min(w0, w_star); the fluid workload lower bound.
double compute_kappa(const ModelConfig& cfg, double w0, double w_star);

struct AssumptionGridOptions {
  std::size_t points = 1000;
  double span = 1e4;  ///< grid runs over [a_min*kappa, a_min*kappa*span]
};

struct AssumptionReport {
  bool complete = false;          ///< false if the equilibrium solve failed
  std::string failure;            ///< reason when incomplete

  bool cond_i_holds = false;      ///< gamma*f(gamma) strictly decreasing on the grid
  double cond_i_grid_lo = 0.0;
  double cond_i_grid_hi = 0.0;
  std::size_t cond_i_grid_points = 0;
  std::optional<double> cond_i_first_violation;

  bool cond_ii_holds = false;
  double cond_ii_dedicated = 0.0;  ///< sum_i b^{d,i} lambda_i
  double cond_ii_service = 0.0;    ///< v mu
  double cond_ii_total = 0.0;      ///< sum_i b^{d,i} lambda_i + b^o Lambda

  static constexpr const char* cond_iii = "n/a (initial condition; enforced by the simulator)";

  bool cond_iv_holds = false;
  std::vector<int> empty_band_exchanges;  ///< 1-based exchange indices

  double w0 = 0.0;
  double w_star = 0.0;
  double kappa = 0.0;
};

AssumptionReport check_assumptions(const ModelConfig& cfg, const std::vector<double>& q0,
                                   const AssumptionGridOptions& grid = {});

}  // namespace fluidlob
