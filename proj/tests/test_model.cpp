#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "fluidlob/errors.hpp"
#include "fluidlob/model.hpp"
#include "fluidlob/rng.hpp"
#include "fluidlob/routing.hpp"
#include "support.hpp"

using namespace fluidlob;
using testing_support::ref1;
using testing_support::ref2;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double simpson(const TypeDistribution& d, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = d.density(a) + d.density(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * d.density(a + k * h);
  return s * h / 3.0;
}

}  // namespace

TEST(TypeDistribution, DensityIntegratesToCdf) {
  const TypeDistribution dists[] = {
      TypeDistribution::exponential(1.0), TypeDistribution::exponential(2.5),
      TypeDistribution::half_normal(1.0), TypeDistribution::half_normal(0.3)};
  for (const auto& d : dists) {
    for (double g : {0.05, 0.3, 1.0, 2.0, 4.0}) {
      EXPECT_NEAR(simpson(d, 0.0, g), d.cdf(g), 1e-8) << "gamma=" << g;
    }
  }
  // Piecewise-constant density: the midpoint rule never evaluates at a knot.
  const auto tab = TypeDistribution::tabulated({{0, 0}, {0.5, 0.2}, {1.5, 0.9}, {3, 1}});
  const int n = 1200;
  double mid = 0.0;
  for (int k = 0; k < n; ++k) mid += tab.density((k + 0.5) * 1.2 / n) * 1.2 / n;
  EXPECT_NEAR(mid, tab.cdf(1.2), 1e-8);
  EXPECT_DOUBLE_EQ(tab.cdf(10.0), 1.0);
  EXPECT_DOUBLE_EQ(tab.cdf(0.0), 0.0);
}

TEST(TypeDistribution, ClosedForms) {
  const auto e = TypeDistribution::exponential(2.0);
  EXPECT_NEAR(e.cdf(0.7), 1.0 - std::exp(-1.4), 1e-15);
  EXPECT_NEAR(e.density(0.7), 2.0 * std::exp(-1.4), 1e-15);
  const auto h = TypeDistribution::half_normal(1.0);
  EXPECT_NEAR(h.cdf(1.0), std::erf(1.0 / std::sqrt(2.0)), 1e-14);
  EXPECT_NEAR(h.density(0.0), std::sqrt(2.0 / M_PI), 1e-14);
  EXPECT_NEAR(e.log_density(800.0), std::log(2.0) - 1600.0, 1e-9);
}

TEST(TypeDistribution, RejectsBadParameters) {
  EXPECT_THROW(TypeDistribution::exponential(0.0), ConfigError);
  EXPECT_THROW(TypeDistribution::half_normal(-1.0), ConfigError);
  EXPECT_THROW(TypeDistribution::tabulated({{0, 0}, {1, 0.5}}), ConfigError);
  EXPECT_THROW(TypeDistribution::tabulated({{0.1, 0}, {1, 1}}), ConfigError);
  EXPECT_THROW(TypeDistribution::tabulated({{0, 0}, {1, 0.6}, {1, 1}}), ConfigError);
}

TEST(TypeDistribution, SampleMeanMatches) {
  RandomStream rng(7, "types");
  const auto e = TypeDistribution::exponential(2.0);
  const auto h = TypeDistribution::half_normal(1.5);
  const int n = 200000;
  double se = 0.0, sh = 0.0;
  for (int k = 0; k < n; ++k) {
    se += e.sample(rng);
    sh += h.sample(rng);
  }
  EXPECT_NEAR(se / n, 0.5, 5 * 0.5 / std::sqrt(n));
  const double mh = 1.5 * std::sqrt(2.0 / M_PI);
  EXPECT_NEAR(sh / n, mh, 5 * 1.5 / std::sqrt(n));
}

TEST(SizeDistribution, Moments) {
  const auto d = SizeDistribution::deterministic(3);
  EXPECT_EQ(d.mean(), 3.0);
  EXPECT_EQ(d.second_moment(), 9.0);
  const auto g = SizeDistribution::geometric(0.25);
  EXPECT_NEAR(g.mean(), 4.0, 1e-14);
  EXPECT_NEAR(g.second_moment(), (2.0 - 0.25) / (0.25 * 0.25), 1e-12);
  const auto t = SizeDistribution::tabulated({0.5, 0.25, 0.25});
  EXPECT_NEAR(t.mean(), 1.75, 1e-15);
  EXPECT_NEAR(t.second_moment(), 0.5 + 1.0 + 2.25, 1e-15);

  RandomStream rng(3, "sizes");
  double s = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const auto x = g.sample(rng);
    ASSERT_GE(x, 1);
    s += static_cast<double>(x);
  }
  EXPECT_NEAR(s / n, 4.0, 5 * std::sqrt(12.0 / n));
}

TEST(Rng, StreamsAreKeyedByNameAndIndex) {
  EXPECT_EQ(derive_seed(1, "market", 0), derive_seed(1, "market", 0));
  EXPECT_NE(derive_seed(1, "market", 0), derive_seed(1, "market", 1));
  EXPECT_NE(derive_seed(1, "market", 0), derive_seed(2, "market", 0));
  EXPECT_NE(derive_seed(1, "market", 0), derive_seed(1, "types", 0));
  RandomStream a(5, "x", 2), b(5, "x", 2);
  for (int k = 0; k < 100; ++k) ASSERT_EQ(a.next_u64(), b.next_u64());
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_EQ(a.draws(), 100u);
  for (int k = 0; k < 1000; ++k) {
    const double x = a.uniform();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    const double y = a.uniform_pos();
    ASSERT_GT(y, 0.0);
    ASSERT_LE(y, 1.0);
  }
}

TEST(Validate, RejectsInvalidFields) {
  auto cfg = ref1();
  EXPECT_NO_THROW(validate(cfg));
  auto bad = cfg;
  bad.beta[1] = 0.0;
  try {
    validate(bad);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "/beta/1");
  }
  bad = cfg;
  bad.rebate0 = 0.5;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = cfg;
  bad.rebates = {1, 1};
  EXPECT_THROW(validate(bad), ConfigError);
  bad = cfg;
  bad.lambda = {0.0, 0.2};
  EXPECT_THROW(validate(bad), ConfigError);
  EXPECT_NO_THROW(validate(bad, RatePolicy::allow_zero));
  bad = cfg;
  bad.v = 2.0;  // size distribution mean still 1
  EXPECT_THROW(validate(bad), ConfigError);
}

TEST(Bands, Ref1) {
  const auto b = compute_bands(ref1());
  EXPECT_NEAR(b.a_minus[0], 0.25, 1e-15);
  EXPECT_NEAR(b.a_minus[1], 0.5, 1e-15);
  EXPECT_NEAR(b.a_plus[0], 0.5, 1e-15);
  EXPECT_EQ(b.a_plus[1], kInf);
  EXPECT_NEAR(b.a_min_global, 0.25, 1e-15);
  EXPECT_FALSE(b.any_empty());
}

TEST(Bands, Ref2) {
  const auto b = compute_bands(ref2());
  EXPECT_NEAR(b.a_minus[0], 0.5, 1e-15);
  EXPECT_NEAR(b.a_minus[1], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(b.a_minus[2], 0.25, 1e-15);
  EXPECT_NEAR(b.a_plus[0], 0.0, 1e-15);
  EXPECT_NEAR(b.a_plus[1], 0.0, 1e-15);
  EXPECT_EQ(b.a_plus[2], kInf);
  EXPECT_EQ(b.empty_band, (std::vector<bool>{true, true, false}));
}

TEST(Bands, SingleExchange) {
  const auto cfg = make_config({1}, {0.5}, 1, 1, -1, {1}, TypeDistribution::exponential(1));
  const auto b = compute_bands(cfg);
  EXPECT_NEAR(b.a_minus[0], 0.5, 1e-15);
  EXPECT_EQ(b.a_plus[0], kInf);
}

TEST(Bands, RandomConfigsHavePositiveLowerEdgesAndOneUnboundedBand) {
  std::mt19937_64 gen(11);
  for (int k = 0; k < 200; ++k) {
    const auto cfg = testing_support::random_config(gen, 5);
    const auto b = compute_bands(cfg);
    const auto top = std::max_element(cfg.rebates.begin(), cfg.rebates.end()) - cfg.rebates.begin();
    for (std::size_t i = 0; i < cfg.size(); ++i) {
      EXPECT_GT(b.a_minus[i], 0.0);
      EXPECT_EQ(std::isinf(b.a_plus[i]), static_cast<long>(i) == top);
    }
  }
}

TEST(Bands, EmptyBandMeansZeroFraction) {
  const auto cfg = ref2();
  const auto b = compute_bands(cfg);
  for (double w = 0.01; w < 100.0; w *= 1.3) {
    const auto c = chi(cfg, b, w);
    for (std::size_t i = 0; i < cfg.size(); ++i) {
      if (b.empty_band[i]) EXPECT_EQ(c[i + 1], 0.0) << "w=" << w;
    }
  }
}

TEST(Kappa, Examples) {
  EXPECT_NEAR(compute_kappa(ref1(), 3.0, 4.0 * std::log(2.0)), 1.38629, 1e-5);
  EXPECT_DOUBLE_EQ(compute_kappa(ref2(), 5.0, 5.0), 5.0);
  auto cfg = ref1();
  EXPECT_DOUBLE_EQ(compute_kappa(cfg, 10.0, 4.0), 2.0);
  EXPECT_THROW(compute_kappa(cfg, 0.0, 4.0), ConfigError);
  EXPECT_THROW(compute_kappa(cfg, 1.0, -4.0), ConfigError);
}

TEST(Kappa, MonotoneInBothArguments) {
  const auto cfg = ref1();
  for (double a = 0.1; a < 10; a *= 1.7) {
    for (double b = 0.1; b < 10; b *= 1.7) {
      EXPECT_LE(compute_kappa(cfg, a, b), compute_kappa(cfg, a * 1.1, b));
      EXPECT_LE(compute_kappa(cfg, a, b), compute_kappa(cfg, a, b * 1.1));
    }
  }
}

TEST(Assumptions, Ref1) {
  const auto rep = check_assumptions(ref1(), {1, 1});
  ASSERT_TRUE(rep.complete);
  EXPECT_TRUE(rep.cond_ii_holds);
  EXPECT_DOUBLE_EQ(rep.cond_ii_dedicated, 0.5);
  EXPECT_DOUBLE_EQ(rep.cond_ii_service, 1.0);
  EXPECT_DOUBLE_EQ(rep.cond_ii_total, 1.5);
  EXPECT_TRUE(rep.cond_iv_holds);
  EXPECT_NEAR(rep.kappa, 1.38629436, 1e-8);
  EXPECT_GE(rep.cond_i_grid_points, 1000u);
  EXPECT_NEAR(rep.cond_i_grid_lo, 0.25 * rep.kappa, 1e-12);
  EXPECT_NEAR(rep.cond_i_grid_hi, 0.25 * rep.kappa * 1e4, 1e-8);
  // gamma e^{-gamma} increases below 1 and the grid starts near 0.35.
  EXPECT_FALSE(rep.cond_i_holds);
}

TEST(Assumptions, Ref2EmptyBands) {
  const auto rep = check_assumptions(ref2(), {1, 1, 1});
  ASSERT_TRUE(rep.complete);
  EXPECT_TRUE(rep.cond_ii_holds);
  EXPECT_FALSE(rep.cond_iv_holds);
  EXPECT_EQ(rep.empty_band_exchanges, (std::vector<int>{1, 2}));
}

TEST(Assumptions, ConditionOneHoldsWhenGridStartsAboveMode) {
  // gamma e^{-gamma} decreases on [1, inf); push a_min kappa above 1.
  const auto cfg = make_config({1}, {0.9}, 1, 1, -1, {1}, TypeDistribution::exponential(1));
  const auto rep = check_assumptions(cfg, {10.0});
  ASSERT_TRUE(rep.complete);
  EXPECT_GT(rep.cond_i_grid_lo, 1.0);
  EXPECT_TRUE(rep.cond_i_holds);
}

TEST(Assumptions, ConditionTwoFailsWithExcessDedicatedFlow) {
  const auto cfg = make_config({1, 1}, {0.6, 0.6}, 1, 1, -1, {1, 2}, TypeDistribution::exponential(1));
  const auto rep = check_assumptions(cfg, {1, 1});
  EXPECT_FALSE(rep.cond_ii_holds);
  EXPECT_FALSE(rep.complete);
  EXPECT_FALSE(rep.failure.empty());
}
