#include "fluidlob/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "fluidlob/errors.hpp"
#include "fluidlob/fluid.hpp"
#include "fluidlob/routing.hpp"

namespace fluidlob {

double workload_balance(const ModelConfig& cfg, const RoutingBands& bands, double w) {
  const std::vector<double> frac = chi(cfg, bands, w);
  double dedicated = 0.0;
  double routed = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    dedicated += cfg.b_dedicated[i] * cfg.lambda[i];
    routed += frac[i + 1];
  }
  return dedicated + cfg.b_optimized * cfg.big_lambda * routed - cfg.v * cfg.mu;
}

Equilibrium solve_equilibrium(const ModelConfig& cfg, const EquilibriumOptions& opts) {
  validate(cfg);
  const RoutingBands bands = compute_bands(cfg);
  auto h = [&](double w) { return workload_balance(cfg, bands, w); };

  const double scale = cfg.v * cfg.mu / cfg.big_lambda;
  const double lo = opts.scan_lo * scale;
  const double hi = opts.scan_hi * scale;
  const std::size_t pts = std::max<std::size_t>(opts.scan_points, 2);
  const double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(pts - 1));

  std::vector<std::pair<double, double>> brackets;
  double a = lo;
  double ha = h(a);
  for (std::size_t k = 1; k < pts; ++k) {
    const double b = (k + 1 == pts) ? hi : a * ratio;
    const double hb = h(b);
    if (ha == 0.0) {
      brackets.emplace_back(a, a);
    } else if ((ha > 0.0 && hb < 0.0) || (ha < 0.0 && hb > 0.0)) {
      brackets.emplace_back(a, b);
    }
    a = b;
    ha = hb;
  }
  if (ha == 0.0) brackets.emplace_back(a, a);
  if (brackets.empty()) {
    throw NoBracketError("no sign change of the workload balance on [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]; check the arrival/service rate conditions");
  }

  Equilibrium eq;
  for (auto [x0, x1] : brackets) {
    double f0 = h(x0);
    while (x1 - x0 > opts.rel_width * x0) {
      const double mid = 0.5 * (x0 + x1);
      if (mid <= x0 || mid >= x1) break;
      const double fm = h(mid);
      if (fm == 0.0) {
        x0 = x1 = mid;
        break;
      }
      if ((fm > 0.0) == (f0 > 0.0)) {
        x0 = mid;
        f0 = fm;
      } else {
        x1 = mid;
      }
    }
    eq.all_roots.push_back(0.5 * (x0 + x1));
  }
  eq.unique = eq.all_roots.size() == 1;
  eq.w_star = eq.all_roots.front();
  eq.chi_at_star = chi(cfg, bands, eq.w_star);
  eq.q_star.resize(cfg.size());
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const double inflow =
        cfg.b_dedicated[i] * cfg.lambda[i] + cfg.b_optimized * cfg.big_lambda * eq.chi_at_star[i + 1];
    eq.q_star[i] = eq.w_star * inflow / (cfg.v * cfg.mu * cfg.beta[i]);
  }
  const std::vector<double> psi = fluid_rhs(cfg, bands, eq.q_star);
  for (double x : psi) eq.residual = std::max(eq.residual, std::abs(x));
  return eq;
}

namespace {

struct RankOneParts {
  double w = 0.0;
  std::vector<double> diag;    // beta_i mu / W
  std::vector<double> weight;  // c_i
};

RankOneParts rank_one_parts(const ModelConfig& cfg, const std::vector<double>& q) {
  if (q.size() != cfg.size()) throw ConfigError("q", "length must equal n_exchanges");
  RankOneParts p;
  p.w = workload(cfg, q);
  if (!(p.w > 0.0)) throw DomainError("workload beta.q must be positive");
  const double mu = cfg.v * cfg.mu;
  const double lam = cfg.b_optimized * cfg.big_lambda;
  const std::vector<double> dchi = chi_derivative(cfg, compute_bands(cfg), p.w);
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const double b = cfg.beta[i];
    p.diag.push_back(b * mu / p.w);
    p.weight.push_back(b * b * q[i] * mu / (p.w * p.w) + lam * b * dchi[i]);
  }
  return p;
}

}  // namespace

Eigen::MatrixXd jacobian(const ModelConfig& cfg, const std::vector<double>& q) {
  if (q.size() != cfg.size()) throw ConfigError("q", "length must equal n_exchanges");
  const double w = workload(cfg, q);
  if (!(w > 0.0)) throw DomainError("jacobian: workload beta.q must be positive");
  const double mu = cfg.v * cfg.mu;
  const double lam = cfg.b_optimized * cfg.big_lambda;
  const std::vector<double> dchi = chi_derivative(cfg, compute_bands(cfg), w);
  const auto n = static_cast<Eigen::Index>(cfg.size());
  Eigen::MatrixXd j(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto i = static_cast<std::size_t>(r);
    // Row i: beta^T scaled by (Lambda chi_i' + mu beta_i q_i / W^2), minus the diagonal.
    const double row_weight = lam * dchi[i] + mu * cfg.beta[i] * q[i] / (w * w);
    for (Eigen::Index c = 0; c < n; ++c) {
      j(r, c) = row_weight * cfg.beta[static_cast<std::size_t>(c)];
    }
    j(r, r) -= mu * cfg.beta[i] / w;
  }
  return j;
}

double det_shifted(const ModelConfig& cfg, const std::vector<double>& q, double nu) {
  if (!(nu >= 0.0)) throw DomainError("det_shifted: nu must be nonnegative");
  const RankOneParts p = rank_one_parts(cfg, q);
  double prod = 1.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.diag.size(); ++i) {
    const double d = p.diag[i] + nu;
    prod *= d;
    sum += p.weight[i] / d;
  }
  const double sign = (p.diag.size() % 2 == 1) ? 1.0 : -1.0;  // (-1)^{N-1}
  return prod * (sum - 1.0) * sign;
}

double secular_function(const ModelConfig& cfg, const std::vector<double>& q, double nu) {
  const RankOneParts p = rank_one_parts(cfg, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.diag.size(); ++i) sum += p.weight[i] / (p.diag[i] + nu);
  return sum - 1.0;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::stable:
      return "stable";
    case Verdict::unstable:
      return "unstable";
    case Verdict::marginal:
      return "marginal";
  }
  return "marginal";
}

SpectrumReport spectrum(const ModelConfig& cfg, const std::vector<double>& q,
                        const SpectrumOptions& opts) {
  SpectrumReport rep;
  rep.q = q;
  rep.jacobian = jacobian(cfg, q);
  rep.w = workload(cfg, q);
  const auto n = rep.jacobian.rows();
  const Eigen::MatrixXd& jac = rep.jacobian;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalue solver did not converge");
  }
  rep.max_real_part = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::complex<double> ev = solver.eigenvalues()(k);
    rep.eigenvalues.push_back(ev);
    rep.max_real_part = std::max(rep.max_real_part, ev.real());
  }
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(),
            [](const auto& a, const auto& b) {
              return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
            });

  const double jnorm = std::max(1.0, jac.norm());
  for (const auto& ev : rep.eigenvalues) {
    const Eigen::MatrixXcd shifted =
        jac.cast<std::complex<double>>() - ev * Eigen::MatrixXcd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
    rep.eigen_residual = std::max(rep.eigen_residual, svd.singularValues()(n - 1) / jnorm);
  }

  // Determinant identity and sign law on the nu grid.
  const double unit = cfg.v * cfg.mu / rep.w;
  const double expected_sign = (n % 2 == 0) ? 1.0 : -1.0;
  const std::size_t pts = std::max<std::size_t>(opts.nu_points, 2);
  for (std::size_t k = 0; k < pts; ++k) {
    const double nu = opts.nu_span * unit * static_cast<double>(k) / static_cast<double>(pts - 1);
    const double direct = (jac - nu * Eigen::MatrixXd::Identity(n, n)).determinant();
    const double formula = det_shifted(cfg, q, nu);
    rep.nu_grid.push_back(nu);
    rep.det_direct.push_back(direct);
    rep.det_formula.push_back(formula);
    const double denom = std::max(std::abs(direct), std::numeric_limits<double>::min());
    rep.det_identity_max_rel_err =
        std::max(rep.det_identity_max_rel_err, std::abs(formula - direct) / denom);
    if (!(direct * expected_sign > 0.0) || !(formula * expected_sign > 0.0)) {
      rep.sign_law_holds = false;
    }
  }

  // Secular cross-check: roots of phi between poles versus real eigenvalues.
  const RankOneParts parts = rank_one_parts(cfg, q);
  std::vector<double> poles;
  for (double d : parts.diag) poles.push_back(-d);
  std::sort(poles.begin(), poles.end());
  const double pole_scale = std::abs(poles.front());
  rep.distinct_poles = true;
  for (std::size_t k = 1; k < poles.size(); ++k) {
    if (poles[k] - poles[k - 1] <= 1e-12 * pole_scale) rep.distinct_poles = false;
  }
  poles.erase(std::unique(poles.begin(), poles.end()), poles.end());

  double radius = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) radius = std::max(radius, jac.row(r).cwiseAbs().sum());
  radius += 1.0;
  const double imag_tol = 1e-9 * jnorm;
  for (const auto& ev : rep.eigenvalues) {
    if (std::abs(ev.imag()) > imag_tol) continue;
    const bool on_pole = std::any_of(poles.begin(), poles.end(), [&](double p) {
      return std::abs(ev.real() - p) <= 1e-9 * jnorm;
    });
    if (!on_pole) ++rep.real_eigenvalues;
  }
  std::vector<double> edges;
  edges.push_back(-radius);
  for (double p : poles) edges.push_back(p);
  edges.push_back(radius);
  auto phi = [&](double nu) {
    double s = 0.0;
    for (std::size_t i = 0; i < parts.diag.size(); ++i) s += parts.weight[i] / (parts.diag[i] + nu);
    return s - 1.0;
  };
  constexpr std::size_t kScan = 4000;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e];
    const double b = edges[e + 1];
    const double margin = 1e-9 * (b - a);
    double prev = phi(a + margin);
    for (std::size_t k = 1; k <= kScan; ++k) {
      const double x = a + margin + (b - a - 2.0 * margin) * static_cast<double>(k) / kScan;
      const double cur = phi(x);
      if ((prev > 0.0 && cur <= 0.0) || (prev < 0.0 && cur >= 0.0)) ++rep.secular_roots;
      prev = cur;
    }
  }
  rep.secular_consistent = !rep.distinct_poles || rep.secular_roots == rep.real_eigenvalues;

  if (rep.max_real_part < -opts.marginal_tol) {
    rep.verdict = Verdict::stable;
  } else if (rep.max_real_part > opts.marginal_tol) {
    rep.verdict = Verdict::unstable;
  } else {
    rep.verdict = Verdict::marginal;
  }
  return rep;
}

}  // namespace fluidlob
