#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ipvt/rng.hpp"
#include "ipvt/stats.hpp"

using namespace ipvt;

TEST(Philox, KnownAnswers) {
  using W = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}), (W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(RngStream, SameSeedAndStreamReproduce) {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs_c |= x != c();
    differs_d |= x != d();
  }
  EXPECT_TRUE(differs_c);
  EXPECT_TRUE(differs_d);
}

TEST(RngStream, StreamsUncorrelated) {
  const std::size_t n = 1000000;
  RngStream a(1, 0), b(1, 1);
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) sxy += (a.uniform() - 0.5) * (b.uniform() - 0.5);
  // Correlation of two independent uniforms: variance of each term is 1/144.
  const double corr = sxy / static_cast<double>(n) * 12.0;
  EXPECT_LE(std::abs(corr), 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST(RngStream, UniformMarginalPassesKs) {
  RngStream rng(9, 3);
  std::vector<double> u(100000);
  for (auto& x : u) {
    x = rng.uniform();
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
  std::sort(u.begin(), u.end());
  EXPECT_GT(stats::ks_statistic(u, [](double x) { return x; }).p_value, 0.01);
}

TEST(RngStream, ExponentialAndCauchyMarginals) {
  // Second-level test: KS p-values of 200 independent streams are uniform.
  std::vector<double> pe, pc;
  for (std::uint64_t s = 0; s < 200; ++s) {
    RngStream rng(5, s);
    std::vector<double> e(2000), c(2000);
    for (auto& x : e) x = rng.exponential();
    for (auto& x : c) x = rng.standard_cauchy();
    std::sort(e.begin(), e.end());
    std::sort(c.begin(), c.end());
    pe.push_back(stats::ks_statistic(e, [](double x) { return 1.0 - std::exp(-x); }).p_value);
    pc.push_back(stats::ks_statistic(c, [](double x) { return 0.5 + std::atan(x) / M_PI; }).p_value);
  }
  std::sort(pe.begin(), pe.end());
  std::sort(pc.begin(), pc.end());
  EXPECT_GT(stats::ks_statistic(pe, [](double x) { return x; }).p_value, 0.01);
  EXPECT_GT(stats::ks_statistic(pc, [](double x) { return x; }).p_value, 0.01);
}

TEST(RngStream, PoissonMean) {
  RngStream rng(2, 2);
  for (double mean : {0.5, 7.0, 300.0}) {
    std::vector<double> k(20000);
    for (auto& x : k) x = static_cast<double>(rng.poisson(mean));
    const auto est = stats::mean_estimate(k);
    EXPECT_NEAR(est.mean, mean, 4.0 * std::sqrt(mean / 20000.0)) << mean;
  }
}

TEST(Ks, RejectsSmallOrUnsortedInput) {
  std::vector<double> small(19, 0.5);
  EXPECT_THROW(stats::ks_statistic(small, [](double x) { return x; }), std::invalid_argument);
  std::vector<double> unsorted(30);
  for (std::size_t i = 0; i < unsorted.size(); ++i) unsorted[i] = static_cast<double>(30 - i) / 31.0;
  EXPECT_THROW(stats::ks_statistic(unsorted, [](double x) { return x; }), std::invalid_argument);
}

TEST(Ks, ConstantSamplesGiveAtLeastHalf) {
  std::vector<double> same(50, 0.3);
  EXPECT_GE(stats::ks_statistic(same, [](double x) { return std::clamp(x, 0.0, 1.0); }).statistic, 0.5);
}

TEST(Ks, CalibrationAtOnePercent) {
  // 1.63/sqrt(n) is the asymptotic 1% point, so about 990 of 1000 trials accept.
  // Require consistency with that rate: at most 1% + 3 binomial standard errors reject.
  const std::size_t n = 100;
  auto accepted = [&](std::uint64_t seed, int trials) {
    int ok = 0;
    for (int trial = 0; trial < trials; ++trial) {
      RngStream rng(seed, static_cast<std::uint64_t>(trial));
      std::vector<double> u(n);
      for (auto& x : u) x = rng.uniform();
      std::sort(u.begin(), u.end());
      ok += stats::ks_statistic(u, [](double x) { return x; }).statistic < stats::ks_critical_1pct(n);
    }
    return ok;
  };
  EXPECT_GE(accepted(11, 1000), 1000 - 10 - 3 * std::sqrt(1000 * 0.01 * 0.99));
  // Pooled over 10⁴ trials the rejection rate lies in [0.5%, 1.3%].
  const int pooled = accepted(12, 10000);
  EXPECT_GE(pooled, 10000 - 130);
  EXPECT_LE(pooled, 10000 - 50);
}

TEST(Ks, KolmogorovSurvivalKnownValues) {
  // P(K > 1.3581) = 0.05 and P(K > 1.6276) = 0.01.
  EXPECT_NEAR(stats::kolmogorov_sf(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(stats::kolmogorov_sf(1.6276), 0.01, 1e-4);
  EXPECT_DOUBLE_EQ(stats::kolmogorov_sf(0.0), 1.0);
}

TEST(Ks, TwoSampleDetectsShift) {
  RngStream rng(3, 0);
  std::vector<double> a(2000), b(2000), c(2000);
  for (auto& x : a) x = rng.uniform();
  for (auto& x : b) x = rng.uniform();
  for (auto& x : c) x = rng.uniform() + 0.1;
  EXPECT_GT(stats::ks_two_sample(a, b).p_value, 0.01);
  EXPECT_LT(stats::ks_two_sample(a, c).p_value, 1e-6);
}

TEST(Estimates, MeanProportionAndFit) {
  const std::vector<double> v{1, 2, 3, 4};
  const auto e = stats::mean_estimate(v);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(e.n, 4u);
  const auto p = stats::proportion(30, 100);
  EXPECT_DOUBLE_EQ(p.mean, 0.3);
  EXPECT_NEAR(p.std_error, std::sqrt(0.3 * 0.7 / 100.0), 1e-15);
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto fit = stats::linear_fit(x, y);
  EXPECT_NEAR(fit.slope, 2.0, 1e-14);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-14);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-14);
}
