#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fluidlob/model.hpp"

namespace fluidlob {

struct EquilibriumOptions {
  std::size_t scan_points = 4000;  ///< geometric grid points for bracketing
  double scan_lo = 1e-6;           ///< grid spans [scan_lo, scan_hi] * (v mu / Lambda)
  double scan_hi = 1e6;
  double rel_width = 1e-13;        ///< bisection stops at this relative bracket width
};

/// Stationary point of the fluid equations.
struct Equilibrium {
  double w_star = 0.0;
  std::vector<double> q_star;
  std::vector<double> chi_at_star;  ///< (chi_0, ..., chi_N) at w_star
  double residual = 0.0;            ///< max-norm of the fluid field at q_star
  std::vector<double> all_roots;    ///< every bracketed root, ascending
  bool unique = true;
};

/// Balance of the summed fluid equations:
/// sum_i b^{d,i} lambda_i + b^o Lambda sum_{i>=1} chi_i(W) - v mu.
double workload_balance(const ModelConfig& cfg, const RoutingBands& bands, double w);

/// Throws NoBracketError when the scan finds no sign change. With several
/// roots, returns the smallest and clears `unique`.
Equilibrium solve_equilibrium(const ModelConfig& cfg, const EquilibriumOptions& opts = {});

/// Exact Jacobian of the fluid field at q:
/// J_ij = b^o Lambda beta_j chi_i'(W) - v mu beta_i delta_ij / W + v mu beta_i q_i beta_j / W^2.
Eigen::MatrixXd jacobian(const ModelConfig& cfg, const std::vector<double>& q);

/// det(J(q) - nu I) through the rank-one-plus-diagonal factorisation
///   prod_i (beta_i mu/W + nu) * (sum_i c_i / (beta_i mu/W + nu) - 1) * (-1)^{N-1},
/// c_i = beta_i^2 q_i mu / W^2 + Lambda beta_i chi_i'(W), with Lambda and mu
/// scaled by b^o and v. Requires nu >= 0.
double det_shifted(const ModelConfig& cfg, const std::vector<double>& q, double nu);

/// phi(nu) = sum_i c_i / (beta_i mu / W + nu) - 1; zeros away from the poles
/// are exactly the real eigenvalues of J(q).
double secular_function(const ModelConfig& cfg, const std::vector<double>& q, double nu);

enum class Verdict { stable, unstable, marginal };

const char* to_string(Verdict v);

struct SpectrumOptions {
  double marginal_tol = 1e-10;
  std::size_t nu_points = 21;   ///< nu grid {0, 0.1, ..., 2} * (v mu / W)
  double nu_span = 2.0;
};

struct SpectrumReport {
  std::vector<double> q;
  double w = 0.0;
  Eigen::MatrixXd jacobian;
  std::vector<std::complex<double>> eigenvalues;
  double max_real_part = 0.0;

  std::vector<double> nu_grid;
  std::vector<double> det_direct;
  std::vector<double> det_formula;
  double det_identity_max_rel_err = 0.0;
  bool sign_law_holds = true;  ///< sign det(J - nu I) = (-1)^N on the whole grid

  /// Largest sigma_min(J - lambda I) / max(1, ||J||) over the eigenvalues.
  double eigen_residual = 0.0;

  bool distinct_poles = false;
  std::size_t secular_roots = 0;     ///< sign changes of phi between poles
  std::size_t real_eigenvalues = 0;  ///< real eigenvalues off the poles
  bool secular_consistent = true;    ///< only meaningful with distinct poles

  Verdict verdict = Verdict::marginal;
};

SpectrumReport spectrum(const ModelConfig& cfg, const std::vector<double>& q,
                        const SpectrumOptions& opts = {});

}  // namespace fluidlob
