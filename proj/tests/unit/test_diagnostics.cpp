#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "crq/diagnostics.hpp"
#include "crq/stats.hpp"
#include "oracles.hpp"

using namespace crq;

TEST(Stats, LeastSquaresSlope) {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> y{1.0, -1.0, -3.0, -5.0};
  EXPECT_DOUBLE_EQ(least_squares_slope(x, y), -2.0);
  EXPECT_TRUE(std::isnan(least_squares_slope(std::vector<double>{1.0}, std::vector<double>{2.0})));
  EXPECT_TRUE(std::isnan(least_squares_slope(std::vector<double>{1.0, 1.0}, std::vector<double>{2.0, 3.0})));
}

TEST(ConstantEstimate, StableFlag) {
  ConstantEstimate e{"x", 0.0, {{6, 1.0}, {4, 3.0}, {8, 1.04}}, false};
  finalize_estimate(e);
  EXPECT_EQ(e.trend.front().first, 4);
  EXPECT_DOUBLE_EQ(e.value, 1.04);
  EXPECT_TRUE(e.stable);
  e.trend = {{4, 1.0}, {6, 1.2}};
  finalize_estimate(e);
  EXPECT_FALSE(e.stable);
  e.trend.clear();
  EXPECT_THROW(finalize_estimate(e), std::invalid_argument);
}

TEST(Upsilon, FlatIsSixteenAtEveryTruncation) {
  std::vector<ConformalBackground> bgs;
  for (int n : {2, 4, 6}) bgs.push_back(make_background(fixture::space(n), SpectralField::zero(n)));
  std::vector<const ConformalBackground*> ptrs;
  for (const auto& b : bgs) ptrs.push_back(&b);
  const auto est = estimate_upsilon(ptrs);
  ASSERT_EQ(est.trend.size(), 3u);
  for (const auto& [n, v] : est.trend) EXPECT_NEAR(v, 16.0, 1e-8) << n;
  EXPECT_TRUE(est.stable);
}

TEST(Upsilon, RejectsEmptyPerp) {
  const auto bg = make_background(fixture::space(1), SpectralField::zero(1));
  EXPECT_THROW(estimate_upsilon({&bg}), std::invalid_argument);
}

TEST(Upsilon, PositiveOnRandomBackgrounds) {
  const auto space = fixture::space(4);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto bg = make_background(space, random_field(*space, seed, 2, 0.5));
    EXPECT_GT(estimate_upsilon({&bg}).value, 0.0);
  }
}

TEST(Subelliptic, ModeElevenClosedForm) {
  const auto est0 = subelliptic_constant(0, {fixture::space(2)});
  EXPECT_NEAR(est0.value, 625.0 / 257.0, 1e-10);
  const auto est2 = subelliptic_constant(2, {fixture::space(2)});
  EXPECT_NEAR(est2.value, 15625.0 / 6401.0, 1e-10);
  EXPECT_THROW(subelliptic_constant(1, {fixture::space(2)}), std::invalid_argument);
  EXPECT_THROW(subelliptic_constant(0, {fixture::space(1)}), std::invalid_argument);
}

TEST(Subelliptic, TrendMatchesExhaustiveScanAndIsStable) {
  std::vector<std::shared_ptr<const SpectralSpace>> spaces;
  for (int n : {4, 6, 8, 10}) spaces.push_back(fixture::space(n));
  for (int k : {0, 2, 4}) {
    const auto est = subelliptic_constant(k, spaces);
    ASSERT_EQ(est.trend.size(), 4u);
    double peak = 0.0;
    bool after_peak = false;
    double prev = 0.0;
    for (const auto& [n, v] : est.trend) {
      EXPECT_NEAR(v, oracle::subelliptic(k, n), 1e-8 * v) << k << " " << n;
      if (after_peak) EXPECT_LE(v, prev * (1.0 + 1e-12));
      if (v >= peak) peak = v;
      else after_peak = true;
      prev = v;
    }
    EXPECT_TRUE(est.stable) << k;
  }
}

namespace {

struct DecayTest : ::testing::Test {
  std::shared_ptr<const SpectralSpace> space = fixture::space(4, 2.0);
  ConformalBackground flat = make_background(space, SpectralField::zero(4));
  FlowConfig cfg = [] {
    FlowConfig c;
    c.truncation = 4;
    c.monitor_stride = 5;
    return c;
  }();

  Trajectory run(const SpectralField& lam0) const { return run_exact_perp(flat, init_flow(flat, lam0, cfg), cfg); }
};

}  // namespace

TEST_F(DecayTest, Mode11DecaysAtSixtyFour) {
  const auto traj = run(mode_field(*space, mode11(), 0.1));
  for (int k : {0, 1, 2}) {
    const auto d = decay_rate_check(flat, traj, k);
    EXPECT_NEAR(d.slope, -64.0, 1e-6) << k;
    EXPECT_TRUE(d.passes_sharp);
    EXPECT_TRUE(d.passes_weak);
    EXPECT_NEAR(d.upsilon, 16.0, 1e-8);
  }
}

TEST_F(DecayTest, MixedDataDecaysAtLeastAsFast) {
  SpectralField lam0 = mode_field(*space, mode11(), 0.05);
  lam0.coeffs[static_cast<Eigen::Index>(space->modes().index(2, 1, 1))] = 0.02;
  lam0.coeffs[static_cast<Eigen::Index>(space->modes().index(2, 2, 0))] = -0.01;
  const auto traj = run(lam0);
  const auto d = decay_rate_check(flat, traj, 1);
  EXPECT_LE(d.slope, -64.0 + 1e-6);
  EXPECT_TRUE(d.passes_sharp);
}

TEST_F(DecayTest, KernelDataIsIdenticallyZero) {
  SpectralField lam0 = SpectralField::zero(4);
  lam0.coeffs[static_cast<Eigen::Index>(space->modes().index(2, 0, 1))] = 0.2;
  cfg.tol_converge = 1e-300;
  cfg.t_max = 0.1;
  const auto traj = run(lam0);
  for (double v : perp_power_norms(flat, traj, 1)) EXPECT_LE(v, 1e-28);
  const auto d = decay_rate_check(flat, traj, 1);
  EXPECT_TRUE(d.identically_zero || d.passes_sharp);
}

TEST_F(DecayTest, RejectsShortOrForcedRuns) {
  Trajectory short_traj = run(SpectralField::zero(4));
  EXPECT_THROW(decay_rate_check(flat, short_traj, 1), std::invalid_argument);
  const auto c03 = make_background(space, mode_field(*space, mode11(), 0.3));
  const auto traj = run_exact_perp(c03, init_flow(c03, SpectralField::zero(4), cfg), cfg);
  EXPECT_THROW(decay_rate_check(c03, traj, 1), std::invalid_argument);
}

TEST(CrossValidate, SecondOrderOnMode11) {
  const auto space = fixture::space(4, 2.0);
  const auto flat = make_background(space, SpectralField::zero(4));
  const auto cv = cross_validate(flat, mode_field(*space, mode11(), 0.1), 1e-3, 0.2);
  EXPECT_NEAR(cv.order, 2.0, 0.2);
  EXPECT_LT(cv.error_half_dt, cv.error_dt);
  EXPECT_LT(cv.error_dt, 1e-4);
}

TEST(CrossValidate, StationaryDataHasNoDiscrepancy) {
  const auto space = fixture::space(4, 2.0);
  const auto flat = make_background(space, SpectralField::zero(4));
  const auto cv = cross_validate(flat, SpectralField::zero(4), 1e-2, 0.1, 2);
  EXPECT_EQ(cv.error_dt, 0.0);
  EXPECT_EQ(cv.error_half_dt, 0.0);
}
