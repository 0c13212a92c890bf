#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ipvt/corona.hpp"
#include "ipvt/hyperbolic.hpp"
#include "ipvt/product_space.hpp"

using namespace ipvt;
using hyp::BoundaryAngle;
using hyp::DiskPoint;
using hyp::ExtendedReal;
using hyp::HalfPlanePoint;
using hyp::Mobius;

namespace {
constexpr double kPi = std::numbers::pi;

DiskPoint random_disk_point(RngStream& rng, double max_modulus = 0.95) {
  return DiskPoint(std::polar(max_modulus * std::sqrt(rng.uniform()), rng.angle()));
}
}  // namespace

TEST(Hyperbolic, KernelExamples) {
  EXPECT_NEAR(hyp::kernel_disk(DiskPoint({0.5, 0.0}), BoundaryAngle(0.0)), 3.0, 1e-15);
  EXPECT_NEAR(hyp::kernel_disk(DiskPoint({0.5, 0.0}), BoundaryAngle(kPi)), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(hyp::kernel_disk(DiskPoint({0.0, 0.0}), BoundaryAngle(1.234)), 1.0);
  EXPECT_NEAR(hyp::kernel_halfplane(HalfPlanePoint({2.0, 3.0}), ExtendedReal(1.0)), 0.6, 1e-15);
  EXPECT_DOUBLE_EQ(hyp::kernel_halfplane(HalfPlanePoint({2.0, 3.0}), ExtendedReal::infinity()), 3.0);
  EXPECT_NEAR(hyp::kernel_disk_max(DiskPoint({0.5, 0.0})), 3.0, 1e-15);
}

TEST(Hyperbolic, Distances) {
  EXPECT_NEAR(hyp::dist_h2(HalfPlanePoint({0, 1}), HalfPlanePoint({0, 2})), std::log(2.0), 1e-15);
  EXPECT_NEAR(hyp::dist_from_origin(DiskPoint({0.5, 0})), std::log(3.0), 1e-15);
  EXPECT_NEAR(hyp::dist_h2(DiskPoint({0, 0}), DiskPoint({0, 0.5})), std::log(3.0), 1e-15);
}

TEST(Hyperbolic, CayleyConventions) {
  EXPECT_NEAR(std::abs(hyp::cayley(DiskPoint({0, 0})).w() - hyp::Complex(0, 1)), 0.0, 1e-15);
  EXPECT_TRUE(hyp::cayley(BoundaryAngle(0.0)).is_infinite());
  EXPECT_NEAR(hyp::cayley(BoundaryAngle(kPi / 2)).value(), -1.0, 1e-15);
  EXPECT_NEAR(hyp::cayley(BoundaryAngle(kPi)).value(), 0.0, 1e-15);
}

TEST(Hyperbolic, CayleyIntertwinesKernelsWithConstantOne) {
  RngStream rng(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const DiskPoint z = random_disk_point(rng);
    const BoundaryAngle theta(rng.angle());
    const double k = hyp::kernel_disk(z, theta);
    const double kh = hyp::kernel_halfplane(hyp::cayley(z), hyp::cayley(theta));
    ASSERT_NEAR(kh / k, 1.0, 1e-10);
  }
}

TEST(Hyperbolic, CayleyRoundTrip) {
  RngStream rng(2, 0);
  for (int i = 0; i < 1000; ++i) {
    const DiskPoint z = random_disk_point(rng);
    EXPECT_NEAR(std::abs(hyp::cayley_inverse(hyp::cayley(z)).z() - z.z()), 0.0, 1e-12);
    const double a = rng.angle();
    EXPECT_NEAR(hyp::circular_distance(hyp::cayley_inverse(hyp::cayley(BoundaryAngle(a))).theta(), a), 0.0, 1e-12);
  }
}

TEST(Hyperbolic, MobiusGroupLawsAndIsometry) {
  RngStream rng(3, 0);
  for (int i = 0; i < 1000; ++i) {
    const Mobius g = Mobius::disk_rotation(rng.angle()).compose(Mobius::to_base_point(random_disk_point(rng, 0.8)));
    const Mobius h = i % 2 ? Mobius::reflection().compose(Mobius::disk_boost(rng.uniform(-0.9, 0.9))) : Mobius::identity();
    const DiskPoint p = random_disk_point(rng), q = random_disk_point(rng);
    EXPECT_NEAR(hyp::dist_h2(g.apply(p), g.apply(q)), hyp::dist_h2(p, q), 1e-9 * (1 + hyp::dist_h2(p, q)));
    EXPECT_NEAR(std::abs(g.inverse().apply(g.apply(p)).z() - p.z()), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(g.compose(h).apply(p).z() - g.apply(h.apply(p)).z()), 0.0, 1e-12);
    EXPECT_EQ(g.compose(h).orientation(), h.orientation());
  }
}

TEST(Hyperbolic, KernelTransformsWithBoundaryDerivative) {
  // K(g z, g θ) = K(z, θ) / |g'(θ)|.
  RngStream rng(4, 0);
  for (int i = 0; i < 1000; ++i) {
    const Mobius g = Mobius::disk_rotation(rng.angle()).compose(Mobius::to_base_point(random_disk_point(rng, 0.7)));
    const DiskPoint z = random_disk_point(rng);
    const BoundaryAngle t(rng.angle());
    EXPECT_NEAR(hyp::kernel_disk(g.apply(z), g.apply(t)) * g.boundary_derivative(t), hyp::kernel_disk(z, t),
                1e-9 * hyp::kernel_disk(z, t));
  }
}

TEST(Hyperbolic, InvalidPointsRejected) {
  EXPECT_THROW(DiskPoint({1.0, 0.0}), std::domain_error);
  EXPECT_THROW(HalfPlanePoint({0.0, -1.0}), std::domain_error);
  EXPECT_THROW(ExtendedReal::infinity().value(), std::logic_error);
}

TEST(ProductSpace, BallVolumeClosedForm) {
  EXPECT_NEAR(ball_volume(1.0), 7.26164910331192186, 1e-13);
  EXPECT_NEAR(ball_volume(5.0), 5859.51567826159989, 1e-9);
  EXPECT_DOUBLE_EQ(ball_volume(0.0), 0.0);
}

TEST(ProductSpace, BallVolumeQuadratureMatches) {
  for (double r : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0})
    EXPECT_LT(std::abs(ball_volume_quadrature(r) / ball_volume(r) - 1.0), 1e-8) << r;
}

TEST(ProductSpace, GrowthRatioIsOneMinusInverseRadius) {
  const double r = 30.0;
  EXPECT_NEAR(ball_volume(r) / (kPi * kPi * r * std::exp(r)), 0.96666666666666667, 1e-12);
}

TEST(ProductSpace, VolumeInverse) {
  for (double r : {0.3, 2.0, 7.5}) EXPECT_NEAR(ball_radius_for_volume(ball_volume(r), 20.0), r, 1e-9);
}

TEST(ProductSpace, L1DistanceAndModels) {
  const ProductPoint a(HalfPlanePoint({0, 1}), HalfPlanePoint({0, 1}));
  const ProductPoint b(HalfPlanePoint({0, 2}), HalfPlanePoint({0, 4}));
  EXPECT_NEAR(dist_l1(a, b), std::log(2.0) + std::log(4.0), 1e-14);
  EXPECT_NEAR(dist_l1(a.to_model(Model::disk), b.to_model(Model::disk)), dist_l1(a, b), 1e-12);
  EXPECT_THROW(a.disk_first(), std::invalid_argument);
}

TEST(ProductSpace, IsometriesPreserveDistanceAndCompose) {
  RngStream rng(5, 0);
  for (int i = 0; i < 1000; ++i) {
    const ProductIsometry g = random_isometry(rng, 2.0), h = random_isometry(rng, 2.0);
    const ProductPoint x(random_disk_point(rng), random_disk_point(rng));
    const ProductPoint y(random_disk_point(rng), random_disk_point(rng));
    EXPECT_NEAR(dist_l1(isometry_apply(g, x), isometry_apply(g, y)), dist_l1(x, y), 1e-8 * (1 + dist_l1(x, y)));
    const ProductPoint a = isometry_apply(g.compose(h), x), b = isometry_apply(g, isometry_apply(h, x));
    EXPECT_NEAR(dist_l1(a, b), 0.0, 1e-8);
    EXPECT_NEAR(dist_l1(isometry_apply(g.inverse(), isometry_apply(g, x)), x), 0.0, 1e-8);
  }
  const ProductPoint x(DiskPoint({0.1, 0.2}), DiskPoint({-0.3, 0.0}));
  const ProductPoint s = isometry_apply(ProductIsometry::swap_factors(), x);
  EXPECT_EQ(s.first(), x.second());
  EXPECT_NEAR(dist_l1(isometry_apply(ProductIsometry::to_origin(x), x), ProductPoint::origin(Model::disk)), 0.0, 1e-12);
}

TEST(ProductSpace, PoissonBallCountMatchesVolume) {
  const double lambda = 0.5, r = 3.0;
  double total = 0.0;
  const int reps = 2000;
  for (int i = 0; i < reps; ++i) {
    RngStream rng(6, static_cast<std::uint64_t>(i));
    const auto pts = sample_ppp_ball(lambda, r, rng);
    for (std::size_t k = 1; k < pts.size(); ++k)
      ASSERT_LE(dist_l1(pts[k - 1], ProductPoint::origin(Model::disk)), dist_l1(pts[k], ProductPoint::origin(Model::disk)));
    total += static_cast<double>(pts.size());
  }
  const double mean = lambda * ball_volume(r);
  EXPECT_NEAR(total / reps, mean, 4.0 * std::sqrt(mean / reps));
}

TEST(Corona, SeparationOfTravelerExample) {
  const ProductPoint z(DiskPoint({0.5, 0}), DiskPoint({0.5, 0}));
  const CoronaPoint p(BoundaryAngle(0.0), BoundaryAngle(0.0), 2.0);
  EXPECT_NEAR(separation(z, p), 2.0 / 9.0, 1e-15);
  EXPECT_NEAR(separation(ProductPoint::origin(Model::disk), p), 2.0, 1e-15);
}

TEST(Corona, SeparationModelIndependent) {
  RngStream rng(7, 0);
  for (int i = 0; i < 1000; ++i) {
    const ProductPoint z(random_disk_point(rng), random_disk_point(rng));
    const CoronaPoint p(BoundaryAngle(rng.angle()), BoundaryAngle(rng.angle()), rng.exponential());
    EXPECT_NEAR(separation(z.to_model(Model::halfplane), p.to_model(Model::halfplane)) / separation(z, p), 1.0, 1e-9);
  }
}

TEST(Corona, SampleIsUnitRateWithUniformAngles) {
  RngStream rng(8, 0);
  const CoronaSample s = sample_corona(5000.0, rng);
  EXPECT_NEAR(static_cast<double>(s.points.size()), 5000.0, 4.0 * std::sqrt(5000.0));
  for (std::size_t i = 1; i < s.points.size(); ++i) ASSERT_LT(s.points[i - 1].r(), s.points[i].r());
  EXPECT_LE(s.points.back().r(), 5000.0);
  const CoronaSample e = extend_corona(s, 6000.0, rng);
  ASSERT_GE(e.points.size(), s.points.size());
  for (std::size_t i = 0; i < s.points.size(); ++i) EXPECT_EQ(e.points[i].r(), s.points[i].r());
  EXPECT_EQ(e.r_cutoff, 6000.0);
}

TEST(Corona, IsometryEquivariance) {
  RngStream rng(9, 0);
  for (int i = 0; i < 10000; ++i) {
    const ProductIsometry g = random_isometry(rng, 3.0);
    const ProductPoint z(random_disk_point(rng), random_disk_point(rng));
    const CoronaPoint c(BoundaryAngle(rng.angle()), BoundaryAngle(rng.angle()), rng.exponential());
    ASSERT_NEAR(separation(isometry_apply(g, z), corona_isometry_apply(g, c)) / separation(z, c), 1.0, 1e-10);
  }
}

TEST(Corona, CellAssignmentAndCertificate) {
  RngStream rng(10, 0);
  const CoronaSample s = sample_corona(200.0, rng);
  const ProductPoint o = ProductPoint::origin(Model::disk);
  // At the origin separation equals radius, so the first point wins with certainty.
  const CellAssignment a = cell_assign(o, s);
  EXPECT_EQ(a.index, 0u);
  EXPECT_TRUE(a.certified);
  EXPECT_NEAR(separation_lower_bound(o, 200.0), 200.0, 1e-12);
  const ProductPoint far(DiskPoint({0.999999, 0}), DiskPoint({-0.999999, 0}));
  EXPECT_LT(separation_lower_bound(far, 200.0), 1e-6);
  for (int i = 0; i < 200; ++i) {
    const ProductPoint z(random_disk_point(rng, 0.9), random_disk_point(rng, 0.9));
    const CellAssignment c = cell_assign(z, s);
    for (std::size_t k = 0; k < s.points.size(); ++k) ASSERT_GE(separation(z, s.points[k]), c.separation);
    if (c.certified) {
      EXPECT_LE(c.separation, separation_lower_bound(z, s.r_cutoff));
    }
  }
}

TEST(Corona, NmlClosedFormsAgreeWithKernel) {
  RngStream rng(11, 0);
  for (int i = 0; i < 100000; ++i) {
    const double r1 = rng.exponential() + 0.1, r = rng.exponential() + 0.1;
    const double theta = rng.standard_cauchy(), phi = rng.standard_cauchy(), y = rng.standard_cauchy();
    const CoronaPoint q(ExtendedReal(theta), ExtendedReal(phi), r);
    // Pick x₁ freely, then solve the closed form for |z₂ − φ| along a random ray.
    const hyp::Complex z1(rng.uniform(-5, 5), 0.05 + rng.exponential());
    const double target = (r1 / r) * (1 + theta * theta) * (1 + phi * phi) / std::norm(z1 - theta);
    const double ang = rng.uniform(0.05, kPi - 0.05);
    const hyp::Complex z2 = phi + std::polar(std::sqrt(target), ang);
    if (z2.imag() < 1e-6) continue;
    const ProductPoint z{HalfPlanePoint(z1), HalfPlanePoint(z2)};
    const CoronaPoint p(ExtendedReal::infinity(), ExtendedReal::infinity(), r1);
    ASSERT_NEAR(nml_residual_inf_inf(z, r1, q) / (r1 / r * (1 + theta * theta) * (1 + phi * phi)), 0.0, 1e-10);
    ASSERT_NEAR(separation(z, p) / separation(z, q), 1.0, 1e-10);
    // (∞, y) form: sign agrees with the kernel comparison at a generic point.
    const ProductPoint w(HalfPlanePoint({rng.uniform(-5, 5), 0.05 + rng.exponential()}),
                         HalfPlanePoint({rng.uniform(-5, 5), 0.05 + rng.exponential()}));
    const CoronaPoint py(ExtendedReal::infinity(), ExtendedReal(y), r1);
    const double res = nml_residual_inf_y(w, y, r1, q);
    const double diff = separation(w, q) - separation(w, py);
    if (std::abs(diff) > 1e-9 * separation(w, q)) {
      ASSERT_EQ(res < 0, diff < 0);
    }
  }
}

TEST(Corona, NmlSymmetricExample) {
  const ProductPoint z(HalfPlanePoint({0, 1}), HalfPlanePoint({0, 1}));
  const CoronaPoint q(ExtendedReal(0.0), ExtendedReal(0.0), 3.0);
  EXPECT_NEAR(nml_residual_inf_inf(z, 3.0, q), 0.0, 1e-15);
  EXPECT_TRUE(nml_predicate(z, CoronaPoint(ExtendedReal::infinity(), ExtendedReal::infinity(), 3.0), q));
}

TEST(Corona, UnboundedProbeFindsValidWitnesses) {
  const CoronaPoint p(BoundaryAngle(0.0), BoundaryAngle(1.0), 0.7);
  const CoronaPoint q(BoundaryAngle(-2.0), BoundaryAngle(0.0), 1.9);
  const auto w = nml_unbounded_probe(p, q, {1.0, 3.0, 6.0});
  ASSERT_EQ(w.size(), 3u);
  for (const auto& x : w)
    if (x.point) {
      EXPECT_TRUE(nml_predicate(*x.point, p, q));
    }
}

TEST(Corona, CsvRoundTrip) {
  RngStream rng(12, 0);
  const CoronaSample s = sample_corona(50.0, rng);
  std::stringstream ss;
  write_corona_csv(ss, s);
  const CoronaSample t = read_corona_csv(ss);
  ASSERT_EQ(t.points.size(), s.points.size());
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    EXPECT_EQ(t.points[i].r(), s.points[i].r());
    EXPECT_EQ(t.points[i].theta_angle(), s.points[i].theta_angle());
    EXPECT_EQ(t.points[i].phi_angle(), s.points[i].phi_angle());
  }
  std::stringstream bad("theta,phi,r\n0,0,-1\n");
  EXPECT_THROW(read_corona_csv(bad), std::exception);
}
