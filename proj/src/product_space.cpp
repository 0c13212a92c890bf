#include "ipvt/product_space.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ipvt {

using hyp::DiskPoint;
using hyp::HalfPlanePoint;

ProductPoint::ProductPoint(const DiskPoint& first, const DiskPoint& second)
    : model_(Model::disk), first_(first.z()), second_(second.z()) {}

ProductPoint::ProductPoint(const HalfPlanePoint& first, const HalfPlanePoint& second)
    : model_(Model::halfplane), first_(first.w()), second_(second.w()) {}

ProductPoint ProductPoint::origin(Model model) {
  if (model == Model::disk) return {DiskPoint(0.0), DiskPoint(0.0)};
  return {HalfPlanePoint({0.0, 1.0}), HalfPlanePoint({0.0, 1.0})};
}

DiskPoint ProductPoint::disk_first() const {
  if (model_ != Model::disk) throw std::invalid_argument("ProductPoint: not in the disk model");
  return DiskPoint(first_);
}

DiskPoint ProductPoint::disk_second() const {
  if (model_ != Model::disk) throw std::invalid_argument("ProductPoint: not in the disk model");
  return DiskPoint(second_);
}

HalfPlanePoint ProductPoint::halfplane_first() const {
  if (model_ != Model::halfplane) throw std::invalid_argument("ProductPoint: not in the half-plane model");
  return HalfPlanePoint(first_);
}

HalfPlanePoint ProductPoint::halfplane_second() const {
  if (model_ != Model::halfplane) throw std::invalid_argument("ProductPoint: not in the half-plane model");
  return HalfPlanePoint(second_);
}

ProductPoint ProductPoint::to_model(Model target) const {
  if (target == model_) return *this;
  if (target == Model::halfplane) return {hyp::cayley(disk_first()), hyp::cayley(disk_second())};
  return {hyp::cayley_inverse(halfplane_first()), hyp::cayley_inverse(halfplane_second())};
}

double dist_l1(const ProductPoint& x, const ProductPoint& y) {
  if (x.model() != y.model()) throw std::invalid_argument("dist_l1: model mismatch");
  if (x.model() == Model::disk)
    return hyp::dist_h2(x.disk_first(), y.disk_first()) + hyp::dist_h2(x.disk_second(), y.disk_second());
  return hyp::dist_h2(x.halfplane_first(), y.halfplane_first()) +
         hyp::dist_h2(x.halfplane_second(), y.halfplane_second());
}

double ball_volume(double r) {
  if (!(r >= 0.0)) throw std::domain_error("ball_volume: radius must be >= 0");
  constexpr double k = 2.0 * std::numbers::pi * std::numbers::pi;
  if (r < 1e-2) {
    // r cosh r − sinh r = r³/3 + r⁵/30 + r⁷/840 + ...
    const double r2 = r * r;
    return k * r * r2 * (1.0 / 3.0 + r2 * (1.0 / 30.0 + r2 / 840.0));
  }
  return k * (r * std::cosh(r) - std::sinh(r));
}

double circle_length(double rho) { return 2.0 * std::numbers::pi * std::sinh(rho); }

double ball_volume_quadrature(double r) {
  if (!(r >= 0.0)) throw std::domain_error("ball_volume_quadrature: radius must be >= 0");
  if (r == 0.0) return 0.0;
  auto integrand = [r](double rho) { return circle_length(rho) * circle_length(r - rho); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, r, 15, 1e-14);
}

double ball_radius_for_volume(double volume, double r_max) {
  if (!(volume >= 0.0)) throw std::domain_error("ball_radius_for_volume: negative volume");
  double lo = 0.0, hi = r_max;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ball_volume(mid) < volume)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

ProductIsometry ProductIsometry::to_origin(const ProductPoint& x) {
  if (x.model() == Model::disk)
    return {hyp::Mobius::to_base_point(x.disk_first()), hyp::Mobius::to_base_point(x.disk_second())};
  return {hyp::Mobius::to_base_point(x.halfplane_first()), hyp::Mobius::to_base_point(x.halfplane_second())};
}

ProductIsometry ProductIsometry::compose(const ProductIsometry& other) const {
  // x ↦ S^s (g1, g2) S^t (h1, h2) x. Moving the inner swap S^t left exchanges the roles of g1, g2.
  if (!other.swap_) return {g1_.compose(other.g1_), g2_.compose(other.g2_), swap_};
  return {g2_.compose(other.g1_), g1_.compose(other.g2_), !swap_};
}

ProductIsometry ProductIsometry::inverse() const {
  // (S (g1, g2))⁻¹ = (g1⁻¹, g2⁻¹) S = S (g2⁻¹, g1⁻¹)
  if (!swap_) return {g1_.inverse(), g2_.inverse(), false};
  return {g2_.inverse(), g1_.inverse(), true};
}

ProductPoint isometry_apply(const ProductIsometry& g, const ProductPoint& x) {
  if (x.model() == Model::disk) {
    const DiskPoint a = g.g1().apply(x.disk_first());
    const DiskPoint b = g.g2().apply(x.disk_second());
    return g.swap() ? ProductPoint(b, a) : ProductPoint(a, b);
  }
  const HalfPlanePoint a = g.g1().apply(x.halfplane_first());
  const HalfPlanePoint b = g.g2().apply(x.halfplane_second());
  return g.swap() ? ProductPoint(b, a) : ProductPoint(a, b);
}

ProductIsometry random_isometry(RngStream& rng, double max_factor_distance) {
  if (!(max_factor_distance >= 0.0)) throw std::invalid_argument("random_isometry: distance must be >= 0");
  auto factor = [&] {
    const double d = max_factor_distance * rng.uniform();
    const DiskPoint w(std::polar(std::tanh(0.5 * d), rng.angle()));
    hyp::Mobius g = hyp::Mobius::disk_rotation(rng.angle()).compose(hyp::Mobius::to_base_point(w));
    if (rng.uniform() < 0.5) g = g.compose(hyp::Mobius::reflection());
    return g;
  };
  const hyp::Mobius g1 = factor();
  const hyp::Mobius g2 = factor();
  return {g1, g2, rng.uniform() < 0.5};
}

double sample_radius_split(double r, RngStream& rng) {
  if (r <= 0.0) return 0.0;
  // sinh ρ sinh(r − ρ) = (cosh r − cosh(r − 2ρ))/2 <= sinh²(r/2)
  const double envelope = std::cosh(r) - 1.0;
  while (true) {
    const double rho = r * rng.uniform();
    const double value = std::cosh(r) - std::cosh(r - 2.0 * rho);
    if (rng.uniform() * envelope <= value) return rho;
  }
}

std::vector<ProductPoint> sample_ppp_ball(double lambda, double r_max, RngStream& rng) {
  if (!(lambda > 0.0)) throw std::invalid_argument("sample_ppp_ball: lambda must be > 0");
  if (!(r_max > 0.0)) throw std::invalid_argument("sample_ppp_ball: r_max must be > 0");
  const double total = ball_volume(r_max);
  const std::uint64_t count = rng.poisson(lambda * total);
  std::vector<double> radii(count);
  for (auto& r : radii) r = ball_radius_for_volume(total * rng.uniform(), r_max);
  std::sort(radii.begin(), radii.end());
  std::vector<ProductPoint> points;
  points.reserve(count);
  for (double r : radii) {
    const double rho = sample_radius_split(r, rng);
    const DiskPoint first(std::polar(std::tanh(0.5 * rho), rng.angle()));
    const DiskPoint second(std::polar(std::tanh(0.5 * (r - rho)), rng.angle()));
    points.emplace_back(first, second);
  }
  return points;
}

}  // namespace ipvt
