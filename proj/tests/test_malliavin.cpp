#include <gtest/gtest.h>

#include <cmath>

#include "fracvol/malliavin.hpp"
#include "fracvol/verify.hpp"

using namespace fracvol;

namespace {

TEST(CoefficientF, Examples) {
  EXPECT_DOUBLE_EQ(coefficient_F(MalliavinCoefficient(DriftSpec::ornstein_uhlenbeck(1.0), 0.0), 0.0, 2.0), -1.0);
  EXPECT_DOUBLE_EQ(coefficient_F(MalliavinCoefficient(DriftSpec::standard_fcir(0.1, 0.6), 0.0), 0.0, 1.0), -0.7);
}

TEST(CoefficientF, NegativeArgumentKeepsOnlyDriftSlope) {
  const DriftSpec d = DriftSpec::standard_fcir(0.1, 0.6);
  const MalliavinCoefficient mc(d, 0.01);
  EXPECT_NEAR(mc(0.0, -1.0), 100.0 * d.df_dz(0.0, -1.0), 1e-9);
}

TEST(CoefficientF, ApproachesLimitAsEpsilonVanishes) {
  const DriftSpec d = DriftSpec::time_varying(0.4, 1.0, 0.02);
  for (double z : {0.2, 0.5, 1.0, 2.0}) {
    const double want = coefficient_F_limit(d, 0.5, z);
    EXPECT_NEAR(MalliavinCoefficient(d, 1e-5)(0.5, z), want, 0.01 * std::abs(want)) << "z = " << z;
    EXPECT_DOUBLE_EQ(MalliavinCoefficient(d, 0.0)(0.5, z), want);
  }
}

TEST(CoefficientF, SingularWithoutRegularization) {
  const MalliavinCoefficient mc(DriftSpec::standard_fcir(0.1, 0.6), 0.0);
  EXPECT_THROW(mc(0.0, 0.0), domain_error);
  EXPECT_THROW(MalliavinCoefficient(DriftSpec::standard_fcir(0.1, 0.6), -0.1), domain_error);
  EXPECT_THROW(coefficient_F_limit(DriftSpec::standard_fcir(0.1, 0.6), 0.0, 0.0), domain_error);
}

struct Fixture {
  TimeGrid grid;
  KernelWeights weights;
  RegularizedZConfig cfg;
  PathBundle bundle;
  ZPath z;
  MalliavinCoefficient mc;

  Fixture(double h, std::size_t n, DriftSpec drift, double eps, double nu, double rho = 0.0)
      : grid(1.0, n),
        weights(kernel_weights(HurstParam(h), grid)),
        cfg{drift, eps, nu, 1.0, true},
        bundle(correlated_bundle(grid, rho, weights, 5, 1)),
        z(simulate_z(cfg, bundle)),
        mc(drift, eps) {}
};

TEST(DW, InstantaneousAndFutureValues) {
  const Fixture f(0.7, 100, DriftSpec::ornstein_uhlenbeck(1.0), 0.0, 0.4);
  ASSERT_FALSE(f.z.tau_index);
  EXPECT_DOUBLE_EQ(dW_z(40, 40, f.z, f.mc, 0.4, f.grid), 0.2);
  EXPECT_EQ(dW_z(41, 40, f.z, f.mc, 0.4, f.grid), 0.0);
  EXPECT_THROW(dW_z(0, 101, f.z, f.mc, 0.4, f.grid), std::out_of_range);
}

TEST(DW, MatchesFiniteDifference) {
  const Fixture f(0.7, 100, DriftSpec::ornstein_uhlenbeck(1.0), 0.0, 0.4);
  for (auto [u, t] : {std::pair<std::size_t, std::size_t>{10, 90}, {30, 60}, {1, 100}, {50, 51}}) {
    const double got = dW_z(u, t, f.z, f.mc, 0.4, f.grid);
    const double fd = fd_dW_z(f.cfg, f.bundle, u, t, 1e-5);
    EXPECT_NEAR(got, fd, 0.01 * std::abs(fd)) << "u=" << u << " t=" << t;
  }
}

TEST(DV, BrownianCaseWithoutDrift) {
  const Fixture f(0.5, 50, DriftSpec::ornstein_uhlenbeck(0.0), 0.0, 0.4);
  for (std::size_t u = 1; u <= 50; u += 7) EXPECT_NEAR(dV_z(u, 50, f.z, f.mc, 0.4, f.weights), 0.2, 1e-12);
  EXPECT_EQ(dV_z(0, 50, f.z, f.mc, 0.4, f.weights), 0.0);
  EXPECT_EQ(dV_z(30, 20, f.z, f.mc, 0.4, f.weights), 0.0);
}

TEST(DV, MatchesFiniteDifference) {
  for (double h : {0.3, 0.7}) {
    const Fixture f(h, 100, DriftSpec::standard_fcir(0.1, 0.6), auto_epsilon(HurstParam(h)), 0.4);
    ASSERT_FALSE(f.z.tau_index);
    for (auto [u, t] : {std::pair<std::size_t, std::size_t>{5, 95}, {40, 70}, {60, 61}}) {
      const double got = dV_z(u, t, f.z, f.mc, 0.4, f.weights);
      const double fd = fd_dV_z(f.cfg, f.bundle, f.weights, u, t, 1e-6);
      EXPECT_NEAR(got, fd, 0.02 * std::abs(fd) + 1e-8) << "H=" << h << " u=" << u << " t=" << t;
    }
  }
}

TEST(DV, ProfileMatchesPointwise) {
  const Fixture f(0.3, 40, DriftSpec::standard_fcir(0.1, 0.6), 0.01, 0.4);
  const auto p = dV_z_profile(10, 30, f.z, f.mc, 0.4, f.weights);
  ASSERT_EQ(p.size(), 31u);
  for (std::size_t j = 0; j < 10; ++j) EXPECT_EQ(p[j], 0.0);
  for (std::size_t j = 10; j <= 30; ++j) EXPECT_EQ(p[j], dV_z(10, j, f.z, f.mc, 0.4, f.weights));
}

TEST(DVtilde, Examples) {
  ZPath z{{1.0, 1.0}, {1.0, 1.0}, std::nullopt};
  EXPECT_DOUBLE_EQ(dVtilde_x(1, 0.0, VolFunction::constant(0.2), z), 0.2);
  EXPECT_DOUBLE_EQ(dVtilde_x(1, 0.6, VolFunction::constant(0.1), z), 0.08);
  EXPECT_THROW(dVtilde_x(1, 1.0, VolFunction::constant(0.1), z), domain_error);
  EXPECT_THROW(dVtilde_x(1, -1.0, VolFunction::constant(0.1), z), domain_error);
  EXPECT_THROW(dVtilde_x(0, 0.5, VolFunction::constant(0.1), z), std::out_of_range);
}

TEST(DB, VanishesForConstantVolatility) {
  const Fixture f(0.7, 60, DriftSpec::standard_fcir(0.1, 0.6), 0.0, 0.4, 1.0);
  const VolFunction vol = VolFunction::constant(0.3);
  EXPECT_EQ(dB_x(10, 60, f.z, f.bundle, f.mc, 0.4, f.weights, vol), 0.0);
  EXPECT_DOUBLE_EQ(dB_x_total(10, 60, f.z, f.bundle, f.mc, 0.4, f.weights, vol), 0.3);
}

TEST(DB, MatchesFiniteDifference) {
  const Fixture f(0.7, 32, DriftSpec::standard_fcir(0.1, 0.6), 0.0, 0.4, 1.0);
  ASSERT_FALSE(f.z.tau_index);
  const VolFunction vol = VolFunction::sqrt_shift(0.1);
  for (auto [u, t] : {std::pair<std::size_t, std::size_t>{1, 32}, {8, 24}, {20, 32}}) {
    const double got = dB_x_total(u, t, f.z, f.bundle, f.mc, 0.4, f.weights, vol);
    const double fd = fd_dB_x(f.cfg, f.bundle, f.weights, vol, 1.0, 0.2, u, t, 1e-6);
    EXPECT_NEAR(got, fd, 0.05 * std::abs(fd)) << "u=" << u << " t=" << t;
  }
}

TEST(DB, FiniteDifferenceNeedsFullCorrelation) {
  const Fixture f(0.7, 16, DriftSpec::standard_fcir(0.1, 0.6), 0.0, 0.4, 0.5);
  EXPECT_THROW(fd_dB_x(f.cfg, f.bundle, f.weights, VolFunction::sqrt_shift(0.1), 1.0, 0.2, 1, 16, 1e-6),
               std::invalid_argument);
}

TEST(Malliavin, RejectsDeadPaths) {
  const TimeGrid grid(1.0, 10);
  const KernelWeights w = kernel_weights(HurstParam(0.5), grid);
  const ZPath z{std::vector<double>(11, 0.0), std::vector<double>(11, 0.0), std::size_t{3}};
  const MalliavinCoefficient mc(DriftSpec::standard_fcir(0.1, 0.6), 0.01);
  EXPECT_NO_THROW(dW_z(1, 2, z, mc, 0.4, grid));
  EXPECT_THROW(dW_z(1, 5, z, mc, 0.4, grid), domain_error);
  EXPECT_THROW(dV_z(1, 5, z, mc, 0.4, w), domain_error);
}

class FiniteDifferenceSuite : public ::testing::TestWithParam<double> {};

TEST_P(FiniteDifferenceSuite, RandomProbes) {
  FdSetup s;
  s.hurst = GetParam();
  for (const CheckResult& r : check_malliavin_fd(s)) EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
  const CheckResult vt = check_dvtilde_fd(s);
  EXPECT_TRUE(vt.pass) << vt.name << ": " << vt.detail;
  const CheckResult db = check_db_fd(s);
  EXPECT_TRUE(db.pass) << db.name << ": " << db.detail;
}

INSTANTIATE_TEST_SUITE_P(Hurst, FiniteDifferenceSuite, ::testing::Values(0.3, 0.7));

}  // namespace
