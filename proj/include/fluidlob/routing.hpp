#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fluidlob/model.hpp"

namespace fluidlob {

/// Queue lengths plus the cached workload W = beta . q.
struct QueueState {
  std::vector<double> q;
  double workload = 0.0;

  static QueueState make(const ModelConfig& cfg, std::vector<double> q);
};

/// Market-order rates mu_i(q) = mu beta_i q_i / W. With epsilon > 0 the
/// denominator is max(W, epsilon); with epsilon = 0 an empty system gives
/// the zero vector.
std::vector<double> market_rates(const ModelConfig& cfg, const QueueState& state,
                                 double epsilon = 0.0);

/// Expected delays W / (mu beta_i v) for nonempty queues and 0 for empty
/// ones. The market-order option (delay 0) is not included.
std::vector<double> expected_delays(const ModelConfig& cfg, const QueueState& state);

/// Argmax of gamma r_i - delay_i over {0} and the exchanges. Ties go to the
/// highest rebate, so index 0 only wins outright. Accepts any delay vector,
/// including the all-zero one of an empty system.
int route_with_delays(const ModelConfig& cfg, double gamma, const std::vector<double>& delays);

/// Routing decision of an investor of type `gamma`. Throws DomainError if
/// the workload is zero.
int route(const ModelConfig& cfg, double gamma, const QueueState& state);

/// Band form of the routing rule: the exchange i with
/// gamma in W [a_i^-, a_i^+], else 0. Valid when every queue is nonempty.
int route_by_bands(const RoutingBands& bands, double gamma, double w);

/// Routing fractions (chi_0, chi_1, ..., chi_N) at workload w, evaluated
/// at max(w, epsilon).
std::vector<double> chi(const ModelConfig& cfg, const RoutingBands& bands, double w,
                        double epsilon = 0.0);
std::vector<double> chi(const ModelConfig& cfg, double w, double epsilon = 0.0);

/// d chi_i / dW for i = 1..N.
std::vector<double> chi_derivative(const ModelConfig& cfg, const RoutingBands& bands, double w);
std::vector<double> chi_derivative(const ModelConfig& cfg, double w);

/// Row i is the gradient of mu_i with respect to q.
Eigen::MatrixXd mu_gradient(const ModelConfig& cfg, const QueueState& state);

}  // namespace fluidlob
