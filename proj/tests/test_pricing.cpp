#include <gtest/gtest.h>

#include <cmath>

#include "fracvol/pricing.hpp"
#include "support/oracles.hpp"

using namespace fracvol;

namespace {

TEST(Payoff, Examples) {
  EXPECT_EQ(payoff_h(0.9, 1.0), 0.0);
  EXPECT_EQ(payoff_h(1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(payoff_h(1.5, 1.0), 1.5);
  EXPECT_EQ(payoff_L(0.9, 1.0), 0.0);
  EXPECT_EQ(payoff_L(1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(payoff_L(1.5, 1.0), 0.625);
  EXPECT_DOUBLE_EQ(PayoffSpec(2.0).h(3.0), 2.0);
  EXPECT_THROW(PayoffSpec(0.0), validation_error);
}

TEST(Payoff, AntiderivativeSlope) {
  for (double x = 0.5; x < 3.0; x += 0.0731) {
    const double step = 1e-6;
    const double num = (payoff_L(x + step, 1.2) - payoff_L(x - step, 1.2)) / (2.0 * step);
    EXPECT_NEAR(num, payoff_h(x, 1.2), 1e-6) << "x = " << x;
  }
}

TEST(BlackScholesOracle, MatchesDensityQuadrature) {
  struct Case {
    double s0, k, r, sigma, t;
  };
  for (const Case c : {Case{1.0, 1.0, 0.2, 0.2, 1.0}, Case{100.0, 90.0, 0.05, 0.3, 0.5},
                       Case{1.0, 1.5, 0.0, 0.1, 2.0}, Case{2.0, 1.0, 0.1, 0.6, 1.0}}) {
    const double want = oracle::lognormal_call_plus_binary(c.s0, c.k, c.r, c.sigma, c.t);
    EXPECT_NEAR(black_scholes_oracle(c.s0, c.k, c.r, c.sigma, c.t), want, 1e-8 * want);
  }
}

TEST(BlackScholesOracle, Limits) {
  // deep in the money: s0 - K e^{-rT} + e^{-rT}
  EXPECT_NEAR(black_scholes_oracle(100.0, 1.0, 0.1, 0.2, 1.0), 100.0, 1e-9);
  EXPECT_NEAR(black_scholes_oracle(0.01, 1.0, 0.1, 0.2, 1.0), 0.0, 1e-12);
  EXPECT_THROW(black_scholes_oracle(1.0, 1.0, 0.1, 0.0, 1.0), domain_error);
  EXPECT_THROW(black_scholes_oracle(1.0, 1.0, -0.1, 0.2, 1.0), domain_error);
}

PricingConfig small_config() {
  PricingConfig cfg;
  cfg.grid = TimeGrid(1.0, 50);
  cfg.hurst = HurstParam(0.7);
  cfg.z = RegularizedZConfig{DriftSpec::standard_fcir(0.1, 0.6), 0.0, 0.4, 1.0, true};
  cfg.n_sims = 100;
  cfg.n_trials = 8;
  cfg.seed = 17;
  return cfg;
}

TEST(Estimators, NoVolatilityIsExact) {
  PricingConfig cfg = small_config();
  cfg.vol = VolFunction::constant(0.0);
  const MCEstimate e = estimate_direct(cfg);
  const double st = std::pow(1.0 + 0.2 / 50.0, 50.0);
  EXPECT_NEAR(e.mean, std::exp(-0.2) * payoff_h(st, 1.0), 1e-13);
  EXPECT_NEAR(e.cv, 0.0, 1e-12);
  EXPECT_EQ(e.n_excluded, 0u);
}

TEST(Estimators, MalliavinPreconditions) {
  PricingConfig cfg = small_config();
  cfg.vol = VolFunction::constant(0.0);
  EXPECT_THROW(estimate_malliavin(cfg), validation_error);
  cfg.vol = VolFunction::sqrt_shift(0.1);
  cfg.rho = 1.0;
  EXPECT_THROW(estimate_malliavin(cfg), validation_error);
  EXPECT_NO_THROW(estimate_direct(cfg));
  cfg.rho = 0.5;
  cfg.n_trials = 1;
  EXPECT_THROW(estimate_direct(cfg), validation_error);
}

TEST(Estimators, WeightHasZeroMean) {
  const PricingConfig cfg = small_config();
  const KernelWeights w = kernel_weights(cfg.hurst, cfg.grid);
  const std::size_t n = 5000;
  double sum = 0.0, sq = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const PathOutcome o = simulate_path_outcome(cfg, w, p, true);
    sum += o.weight;
    sq += o.weight * o.weight;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_NEAR(mean, 0.0, 3.0 * se);
}

TEST(Estimators, DeterministicAndThreadInvariant) {
  PricingConfig cfg = small_config();
  const PricingResult a = run_trials(cfg, Estimator::Both);
  cfg.threads = 3;
  const PricingResult b = run_trials(cfg, Estimator::Both);
  EXPECT_EQ(a.direct->trial_means, b.direct->trial_means);
  EXPECT_EQ(a.malliavin->trial_means, b.malliavin->trial_means);
  EXPECT_EQ(a.direct->mean, b.direct->mean);
  cfg.seed = 18;
  EXPECT_NE(run_trials(cfg, Estimator::Direct).direct->mean, a.direct->mean);
}

TEST(Estimators, BothMatchesSeparateRuns) {
  const PricingConfig cfg = small_config();
  const PricingResult both = run_trials(cfg, Estimator::Both);
  EXPECT_EQ(both.direct->mean, estimate_direct(cfg).mean);
  EXPECT_EQ(both.malliavin->mean, estimate_malliavin(cfg).mean);
}

TEST(Estimators, SummaryStatistics) {
  const MCEstimate e = summarize_trials({1.0, 2.0, 3.0, 6.0}, 10, 1, 4);
  EXPECT_DOUBLE_EQ(e.mean, 3.0);
  const double sd = std::sqrt(14.0 / 3.0);
  EXPECT_DOUBLE_EQ(e.std_err, sd / 2.0);
  EXPECT_DOUBLE_EQ(e.cv, sd / 3.0);
  EXPECT_TRUE(e.flagged);
  EXPECT_FALSE(summarize_trials({1.0, 2.0}, 1000, 9, 0).flagged);
  EXPECT_TRUE(summarize_trials({1.0, 2.0}, 1000, 10, 0).flagged);
}

TEST(Estimators, CvRecomputesFromTrialMeans) {
  const MCEstimate e = estimate_direct(small_config());
  ASSERT_EQ(e.trial_means.size(), 8u);
  double m = 0.0;
  for (double x : e.trial_means) m += x;
  m /= 8.0;
  double v = 0.0;
  for (double x : e.trial_means) v += (x - m) * (x - m);
  EXPECT_NEAR(e.cv, std::sqrt(v / 7.0) / m, 1e-12);
}

TEST(Estimators, StandardErrorShrinksWithSims) {
  PricingConfig cfg = small_config();
  cfg.n_trials = 20;
  cfg.n_sims = 50;
  const double coarse = estimate_direct(cfg).std_err;
  cfg.n_sims = 800;
  const double fine = estimate_direct(cfg).std_err;
  // ratio sqrt(16) = 4 up to trial-variance noise
  EXPECT_GT(coarse / fine, 2.5);
  EXPECT_LT(coarse / fine, 6.5);
}

TEST(Estimators, ConstantVolatilityMatchesClosedForm) {
  PricingConfig cfg;
  cfg.grid = TimeGrid(1.0, 100);
  cfg.z = RegularizedZConfig{DriftSpec::standard_fcir(0.1, 0.6), 0.01, 0.0, 1.0, true};
  cfg.vol = VolFunction::constant(0.2);
  cfg.rho = 0.0;
  cfg.n_sims = 400;
  cfg.n_trials = 25;
  const PricingResult r = run_trials(cfg, Estimator::Both);
  const double bs = black_scholes_oracle(1.0, 1.0, 0.2, 0.2, 1.0);
  // the Euler bias at 100 steps is far below the statistical error
  EXPECT_NEAR(r.direct->mean, bs, 3.0 * r.direct->std_err);
  EXPECT_NEAR(r.malliavin->mean, bs, 3.0 * r.malliavin->std_err);
  EXPECT_EQ(r.direct->n_excluded, 0u);
}

}  // namespace
