#include <cmath>

#include <gtest/gtest.h>

#include "fluidlob/equilibrium.hpp"
#include "fluidlob/errors.hpp"
#include "fluidlob/fluid.hpp"
#include "fluidlob/routing.hpp"
#include "support.hpp"

using namespace fluidlob;
using testing_support::max_abs_diff;
using testing_support::ref1;
using testing_support::ref2;

namespace {

const std::vector<double> kRef1Star{0.762461898616, 1.24766492501};

double sup_gap(const FluidTrajectory& a, const FluidTrajectory& b) {
  double m = 0.0;
  for (double t = 0.0; t <= a.times.back() + 1e-12; t += 0.2) m = std::max(m, max_abs_diff(a.at(t), b.at(t)));
  return m;
}

}  // namespace

TEST(FluidRhs, Examples) {
  const auto cfg = ref1();
  const auto psi = fluid_rhs(cfg, {1, 1});
  const double chi1 = std::exp(-0.75) - std::exp(-1.5), chi2 = std::exp(-1.5);
  EXPECT_NEAR(psi[0], 0.3 + chi1 - 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(psi[1], 0.2 + chi2 - 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(psi[0], -0.11743, 1e-5);
  EXPECT_NEAR(psi[1], 0.08980, 1e-5);

  const auto psi2 = fluid_rhs(ref2(), {1, 1, 1});
  EXPECT_NEAR(psi2[2], 0.2 + std::exp(-0.75) - 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(psi2[2], 0.33903, 1e-5);

  EXPECT_THROW(fluid_rhs(cfg, {0, 0}), DomainError);
}

TEST(FluidRhs, VanishesAtEquilibrium) {
  for (const auto& cfg : {ref1(), ref2()}) {
    const auto eq = solve_equilibrium(cfg);
    for (double x : fluid_rhs(cfg, eq.q_star)) EXPECT_LT(std::abs(x), 1e-10);
  }
}

TEST(WorkloadRhs, Ref2Signs) {
  const auto cfg = ref2();
  const double w_star = 4.0 * std::log(2.5);
  EXPECT_NEAR(workload_rhs(cfg, w_star), 0.0, 1e-12);
  for (double w : {0.5, 1.0, 3.0, 3.6}) EXPECT_GT(workload_rhs(cfg, w), 0.0);
  for (double w : {3.7, 5.0, 50.0}) EXPECT_LT(workload_rhs(cfg, w), 0.0);
  EXPECT_THROW(workload_rhs(ref1(), 2.0), ConfigError);
}

TEST(WorkloadRhs, ZeroOptimizedFlowIsConstant) {
  auto cfg = ref2();
  cfg.big_lambda = 0.0;
  for (double w : {0.1, 1.0, 10.0}) EXPECT_NEAR(workload_rhs(cfg, w), 0.6 - 1.0, 1e-15);
}

TEST(Integrate, FixedPointStays) {
  const auto cfg = ref1();
  const auto eq = solve_equilibrium(cfg);
  const auto traj = integrate(cfg, eq.q_star, 20.0);
  for (const auto& s : traj.states) ASSERT_LT(max_abs_diff(s, eq.q_star), 1e-9);
}

TEST(Integrate, Ref1ConvergesAboveKappa) {
  const auto cfg = ref1();
  IntegratorConfig icfg;
  icfg.record_every = 100;
  const auto traj = integrate(cfg, {1, 1}, 200.0, icfg);
  EXPECT_LT(max_abs_diff(traj.terminal(), kRef1Star), 1e-6);
  EXPECT_NEAR(traj.kappa, 1.38629436112, 1e-9);
  EXPECT_GT(traj.min_workload, traj.kappa * (1 - 1e-6));
  EXPECT_DOUBLE_EQ(traj.dt, 1e-3);
  EXPECT_EQ(traj.stats.steps, 200000u);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    EXPECT_NEAR(traj.workload[k], 2 * traj.states[k][0] + traj.states[k][1], 1e-12);
    for (double x : traj.states[k]) EXPECT_GE(x, 0.0);
  }
}

TEST(Integrate, SemigroupProperty) {
  const auto cfg = ref1();
  const double T = 5.0;
  const auto full = integrate(cfg, {1, 1}, 2 * T);
  const auto first = integrate(cfg, {1, 1}, T);
  const auto second = integrate(cfg, first.terminal(), T);
  EXPECT_LT(max_abs_diff(second.terminal(), full.terminal()), 1e-8);
}

TEST(Integrate, StepHalvingShowsFourthOrder) {
  const auto cfg = ref1();
  IntegratorConfig c1, c2, c4;
  c1.dt = 0.2;
  c2.dt = 0.1;
  c4.dt = 0.05;
  const auto a = integrate(cfg, {3, 0.2}, 10.0, c1);
  const auto b = integrate(cfg, {3, 0.2}, 10.0, c2);
  const auto c = integrate(cfg, {3, 0.2}, 10.0, c4);
  const double e1 = max_abs_diff(a.terminal(), b.terminal());
  const double e2 = max_abs_diff(b.terminal(), c.terminal());
  EXPECT_GT(e1 / e2, 8.0) << e1 << " " << e2;
  EXPECT_GT(sup_gap(a, b) / sup_gap(b, c), 8.0);
}

TEST(Integrate, RefineCheckReportsDiscrepancy) {
  const auto cfg = ref1();
  IntegratorConfig icfg;
  icfg.refine_check = true;
  const auto traj = integrate(cfg, {1, 1}, 5.0, icfg);
  EXPECT_GT(traj.stats.max_refine_error, 0.0);
  EXPECT_LT(traj.stats.max_refine_error, 1e-12);
  icfg.dt = 5.0;
  EXPECT_THROW(integrate(cfg, {4, 4}, 50.0, icfg), std::runtime_error);
}

TEST(Integrate, FloorBreachIsReported) {
  const auto cfg = ref1();
  IntegratorConfig icfg;
  icfg.kappa = 10.0;  // fake bound far above the true workload
  EXPECT_THROW(integrate(cfg, {1, 1}, 1.0, icfg), SingularityError);
}

TEST(Integrate, RejectsBadInput) {
  const auto cfg = ref1();
  EXPECT_THROW(integrate(cfg, {0, 0}, 1.0), ConfigError);
  EXPECT_THROW(integrate(cfg, {-1, 2}, 1.0), ConfigError);
  EXPECT_THROW(integrate(cfg, {1, 1, 1}, 1.0), ConfigError);
}

TEST(Integrate, EqualBetaWorkloadMatchesScalarEquation) {
  const auto cfg = ref2();
  for (const auto& q0 : std::vector<std::vector<double>>{{1, 1, 1}, {4, 0.1, 0.2}, {0.05, 0.05, 0.3}}) {
    IntegratorConfig icfg;
    const auto traj = integrate(cfg, q0, 30.0, icfg);
    const auto w = integrate_workload(cfg, workload(cfg, q0), 30.0, traj.dt);
    ASSERT_EQ(w.size(), traj.workload.size());
    for (std::size_t k = 0; k < w.size(); ++k) ASSERT_NEAR(w[k], traj.workload[k], 1e-8);
  }
}

TEST(Integrate, InterpolationAndTerminal) {
  const auto cfg = ref1();
  IntegratorConfig icfg;
  icfg.record_every = 7;
  const auto traj = integrate(cfg, {1, 1}, 1.0, icfg);
  EXPECT_DOUBLE_EQ(traj.times.front(), 0.0);
  EXPECT_DOUBLE_EQ(traj.times.back(), 1.0);
  EXPECT_EQ(traj.at(0.0), traj.states.front());
  EXPECT_EQ(traj.at(1.0), traj.terminal());
}
