#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ipvt/coverage.hpp"
#include "ipvt/finite_intensity.hpp"
#include "ipvt/separation_field.hpp"

using namespace ipvt;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}
}  // namespace

TEST(FiniteIntensity, DelayClosedForms) {
  EXPECT_NEAR(delay_shift(1e-6), 11.1897186434882633, 1e-12);
  EXPECT_NEAR(limit_delay_mass(-3.0, 1.0), 26.3369876284798151, 1e-12);
  EXPECT_NEAR(limit_delay_intensity(0.0), kPi * kPi, 1e-14);
  EXPECT_NEAR(exact_delay_mass(1e-12, -1.0, 0.0), 5.39501495389920672, 1e-9);
  EXPECT_NEAR(exact_delay_mass(1e-6, -3.0, 1.0), 21.4736179725511984, 1e-8);
  // The finite-λ mass approaches the limit as λ → 0, but only logarithmically.
  const double far = exact_delay_mass(1e-200, -1.0, 0.0) / limit_delay_mass(-1.0, 0.0);
  EXPECT_GT(far, exact_delay_mass(1e-12, -1.0, 0.0) / limit_delay_mass(-1.0, 0.0));
  EXPECT_NEAR(far, 1.0, 0.02);
  EXPECT_THROW(delays(NucleiSet{{}, 0.5, 1.0}), std::invalid_argument);
}

TEST(FiniteIntensity, VoronoiAssignNearest) {
  RngStream rng(1, 0);
  const NucleiSet n = sample_nuclei(0.05, 4.0, rng);
  ASSERT_GT(n.points.size(), 3u);
  for (std::size_t i = 0; i < n.points.size(); ++i) EXPECT_EQ(voronoi_assign(n.points[i], n), i);
  EXPECT_EQ(voronoi_assign(ProductPoint::origin(Model::disk), n), 0u);
}

TEST(FiniteIntensity, ExactLawHoldsAtModerateLambda) {
  const std::vector<double> edges{-3, -2, -1, 0, 1};
  const auto rep = delay_convergence_test(1e-3, 2000, edges, 7);
  EXPECT_TRUE(rep.passed_exact) << rep.to_json().dump(1);
  EXPECT_GT(rep.first_delay_ks_exact.p_value, 0.01);
}

TEST(Coverage, CrossAndInscribedDisk) {
  const HyperbolicCross hc{1.0, 1.0, 1.0};
  const Disk d = inscribed_disk(hc);
  EXPECT_DOUBLE_EQ(d.cx, 1.0);
  EXPECT_DOUBLE_EQ(d.cy, 1.0);
  EXPECT_NEAR(d.radius, 2.0, 1e-14);
  EXPECT_TRUE(cross_contains(hc, 1.0, 100.0));
  EXPECT_FALSE(cross_contains(hc, 3.0, 3.0));
}

TEST(Coverage, InscribedDiskContainmentAndTightness) {
  RngStream rng(2, 0);
  for (int i = 0; i < 100; ++i) {
    const HyperbolicCross hc{rng.standard_cauchy(), rng.standard_cauchy(), rng.uniform()};
    const Disk d = inscribed_disk(hc);
    bool escapes = false;
    for (int k = 0; k < 10000; ++k) {
      const double a = 2.0 * kPi * k / 10000.0;
      ASSERT_TRUE(cross_contains(hc, d.cx + 0.999999 * d.radius * std::cos(a), d.cy + 0.999999 * d.radius * std::sin(a)));
      escapes |= !cross_contains(hc, d.cx + 1.001 * d.radius * std::cos(a), d.cy + 1.001 * d.radius * std::sin(a));
    }
    EXPECT_TRUE(escapes);
  }
}

TEST(Coverage, CoronaDepositionMatchesDirectSampler) {
  std::vector<double> xa, xb, ta, tb;
  for (int i = 0; i < 400; ++i) {
    RngStream a(3, static_cast<std::uint64_t>(i)), b(4, static_cast<std::uint64_t>(i));
    double r1 = 0.0;
    const auto ev = deposition_from_corona(sample_corona(30.0, a), r1);
    const auto direct = sample_deposition(5, b);
    for (std::size_t k = 0; k < std::min<std::size_t>(5, ev.size()); ++k) {
      xa.push_back(ev[k].x);
      ta.push_back(ev[k].t);
    }
    for (const auto& e : direct) {
      xb.push_back(e.x);
      tb.push_back(e.t);
    }
  }
  EXPECT_GT(stats::ks_two_sample(xa, xb).p_value, 0.01);
  const auto sx = sorted(xb);
  EXPECT_GT(stats::ks_statistic(sx, [](double x) { return 0.5 + std::atan(x) / kPi; }).p_value, 0.01);
}

TEST(Coverage, DiskCoverageNeverExceedsCross) {
  RngStream rng(5, 0);
  const auto ev = sample_deposition(2000, rng);
  CoverageGrid gc(10.0, 128), gd(10.0, 128);
  const auto c = coverage_run(gc, 1.0, ev, CoverageMode::crosses);
  const auto d = coverage_run(gd, 1.0, ev, CoverageMode::inscribed_disks);
  for (std::size_t k = 0; k < ev.size(); ++k) {
    ASSERT_LE(d.covered[k], c.covered[k]);
    if (k) {
      ASSERT_GE(c.covered[k], c.covered[k - 1]);
    }
  }
  // Brute force check of the final cross coverage.
  std::uint64_t brute = 0;
  for (std::size_t r = 0; r < 128; ++r)
    for (std::size_t col = 0; col < 128; ++col) {
      bool hit = false;
      for (const auto& e : ev) hit = hit || cross_contains(event_cross(e, 1.0), gc.center(col), gc.center(r));
      brute += hit;
      ASSERT_EQ(hit, gc.covered(r, col));
    }
  EXPECT_EQ(brute, c.covered.back());
}

TEST(Coverage, BallModelExponentAndConstraint) {
  const auto rep = ball_model_intensity_check(1.0, 100000, 9);
  EXPECT_NEAR(rep.fitted_exponent, -5.0, 0.2);
  EXPECT_EQ(rep.constraint_violations, 0u);
  EXPECT_GT(rep.loose_constraint_violations, 0u);
}

TEST(Coverage, MushroomLineConfinedNearCompetitor) {
  RngStream rng(6, 0);
  for (int i = 0; i < 50; ++i) {
    const double r1 = rng.exponential(), ri = r1 + rng.exponential();
    const auto rep = mushroom_region(rng.standard_cauchy(), rng.standard_cauchy(), ri, r1, rng.standard_cauchy(), 10.0, 101);
    EXPECT_EQ(rep.line_members_outside, 0u);
    EXPECT_EQ(rep.kernel_line_members_outside, 0u);
  }
}

TEST(SeparationField, ExpansionMatchesKernelProduct) {
  RngStream rng(7, 0);
  int uncorrected_failures = 0;
  for (int i = 0; i < 100000; ++i) {
    const double eps = std::exp(rng.uniform(std::log(1e-4), 0.0));
    const double theta = rng.angle(), phi = rng.angle(), r = rng.exponential() + 1e-3;
    const TravelerState s = TravelerState::at_epsilon(eps);
    const double exact = separation(s.position(), CoronaPoint(hyp::BoundaryAngle(theta), hyp::BoundaryAngle(phi), r));
    ASSERT_NEAR(separation_expansion(s, theta, phi, r) / exact, 1.0, 1e-10) << eps;
    uncorrected_failures += std::abs(separation_expansion(s, theta, phi, r, CrossCoefficient::uncorrected) / exact - 1.0) > 1e-10;
  }
  EXPECT_GT(uncorrected_failures, 99000);
}

TEST(SeparationField, FrozenExpansionValue) {
  const TravelerState s = TravelerState::at_epsilon(0.3);
  EXPECT_NEAR(separation_expansion(s, 1.0, 2.0, 1.5), 8.76825434878166058, 1e-12);
  EXPECT_DOUBLE_EQ(f3(0.5), f3_uncorrected(0.5));
  EXPECT_NE(f3(0.3), f3_uncorrected(0.3));
  EXPECT_NEAR(TravelerState::at_time(2.0).rho(), std::tanh(1.0), 1e-15);
}

TEST(SeparationField, EnvelopeAgreesWithTruncatedSampler) {
  std::vector<double> ta, tb, ya, yb;
  for (int i = 0; i < 400; ++i) {
    RngStream a(8, static_cast<std::uint64_t>(i)), b(9, static_cast<std::uint64_t>(i));
    const auto fa = rescaled_field_sample(0.05, {1.0, 0.3}, {1.0, -0.2}, 4.0, a, FieldSampler::truncated);
    const auto fb = rescaled_field_sample(0.05, {1.0, 0.3}, {1.0, -0.2}, 4.0, b, FieldSampler::envelope);
    for (const auto& x : fa) {
      ta.push_back(x.theta_hat);
      ya.push_back(x.y);
    }
    for (const auto& x : fb) {
      tb.push_back(x.theta_hat);
      yb.push_back(x.y);
    }
  }
  EXPECT_NEAR(static_cast<double>(ta.size()) / static_cast<double>(tb.size()), 1.0, 0.08);
  EXPECT_GT(stats::ks_two_sample(ta, tb).p_value, 0.01);
  EXPECT_GT(stats::ks_two_sample(ya, yb).p_value, 0.01);
}

TEST(SeparationField, AdmissibilityEnforced) {
  RngStream rng(10, 0);
  EXPECT_THROW(rescaled_field_sample(0.5, {0.1, 2.0}, {1.0, 0.0}, 1.0, rng), std::invalid_argument);
}

TEST(SeparationField, LimitSamplerMarginals) {
  RngStream rng(11, 0);
  const auto f = limit_field_sample({2.0, 1.0}, {1.0, 0.0}, 2000.0, rng, 1.0);
  std::vector<double> th;
  for (const auto& x : f) th.push_back(x.theta_hat);
  std::sort(th.begin(), th.end());
  EXPECT_GT(stats::ks_statistic(th, [](double x) { return 0.5 + std::atan((x + 1.0) / 2.0) / kPi; }).p_value, 0.01);
  EXPECT_NEAR(static_cast<double>(f.size()), 2000.0, 4.0 * std::sqrt(2000.0));
}

TEST(SeparationField, TiebreakConstantAndEstimators) {
  EXPECT_NEAR(tiebreak_constant(), 0.702642367284675543, 1e-15);
  const auto a = tiebreak_estimate(TiebreakMethod::direct_z, 1000000, 1);
  const auto b = tiebreak_estimate(TiebreakMethod::corona_limit, 1000000, 1, 1, std::uint64_t{1} << 40);
  EXPECT_NEAR(a.estimate.mean, tiebreak_constant(), 4.0 * a.estimate.std_error);
  EXPECT_NEAR(b.estimate.mean, tiebreak_constant(), 4.0 * b.estimate.std_error);
  EXPECT_THROW(tiebreak_estimate(TiebreakMethod::direct_z, 10, 1), std::invalid_argument);
  // Deterministic regardless of thread count.
  EXPECT_EQ(tiebreak_estimate(TiebreakMethod::direct_z, 3000000, 2, 1).hits,
            tiebreak_estimate(TiebreakMethod::direct_z, 3000000, 2, 3).hits);
}

TEST(SeparationField, RayProbeInEndNeverExits) {
  RngStream rng(12, 0);
  const CoronaSample s = sample_corona(1000.0, rng);
  std::vector<double> grid;
  for (int k = 1; k <= 30; ++k) grid.push_back(0.5 * k);
  const auto v = probe_ray(s, s.points[0].theta_angle(), s.points[0].phi_angle(), grid);
  EXPECT_FALSE(v.exits);
  EXPECT_THROW(end_of_cell_probe(s, s.points[0].theta_angle() + 0.1, 0.0, grid, 0.25), std::invalid_argument);
}
