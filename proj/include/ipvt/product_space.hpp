#pragma once

#include <vector>

#include "ipvt/hyperbolic.hpp"
#include "ipvt/rng.hpp"

namespace ipvt {

using hyp::Complex;
using hyp::Model;

/// Point of H² × H², both factors in the same model.
class ProductPoint {
 public:
  ProductPoint(const hyp::DiskPoint& first, const hyp::DiskPoint& second);
  ProductPoint(const hyp::HalfPlanePoint& first, const hyp::HalfPlanePoint& second);

  /// The base point 𝐨: (0, 0) in the disk model, (i, i) in the half-plane model.
  static ProductPoint origin(Model model);

  Model model() const { return model_; }
  /// Raw factor coordinates.
  Complex first() const { return first_; }
  Complex second() const { return second_; }

  /// Throw std::invalid_argument on model mismatch.
  hyp::DiskPoint disk_first() const;
  hyp::DiskPoint disk_second() const;
  hyp::HalfPlanePoint halfplane_first() const;
  hyp::HalfPlanePoint halfplane_second() const;

  ProductPoint to_model(Model target) const;

 private:
  Model model_;
  Complex first_, second_;
};

/// d(x, y) = d_H(x₁, y₁) + d_H(x₂, y₂).
double dist_l1(const ProductPoint& x, const ProductPoint& y);

/// Vol(B_r(𝐨)) = 2π²(r cosh r − sinh r).
double ball_volume(double r);

/// Circumference of a hyperbolic circle, f₂(ρ) = 2π sinh ρ.
double circle_length(double rho);

/// ∫₀ʳ f₂(ρ)f₂(r − ρ)dρ with f₂ = circle_length, by adaptive Gauss–Kronrod quadrature.
double ball_volume_quadrature(double r);

/// Inverse of ball_volume by bracketed bisection; `volume` in [0, ball_volume(r_max)].
double ball_radius_for_volume(double volume, double r_max);

/// Element of (Möb₂ × Möb₂) ⋊ Z/2: apply (g1, g2) factorwise, then swap if set.
class ProductIsometry {
 public:
  ProductIsometry(hyp::Mobius g1, hyp::Mobius g2, bool swap = false)
      : g1_(g1), g2_(g2), swap_(swap) {}

  static ProductIsometry identity() { return {hyp::Mobius::identity(), hyp::Mobius::identity(), false}; }
  static ProductIsometry swap_factors() { return {hyp::Mobius::identity(), hyp::Mobius::identity(), true}; }
  /// Factorwise maps sending x to 𝐨.
  static ProductIsometry to_origin(const ProductPoint& x);

  const hyp::Mobius& g1() const { return g1_; }
  const hyp::Mobius& g2() const { return g2_; }
  bool swap() const { return swap_; }

  /// (this ∘ other)·x = this·(other·x).
  ProductIsometry compose(const ProductIsometry& other) const;
  ProductIsometry inverse() const;

 private:
  hyp::Mobius g1_, g2_;
  bool swap_;
};

ProductPoint isometry_apply(const ProductIsometry& g, const ProductPoint& x);

/// Disk-model isometry with random rotations, reflections and factor swap;
/// each factor moves the origin by at most `max_factor_distance`.
ProductIsometry random_isometry(RngStream& rng, double max_factor_distance);

/// Poisson process of intensity λ·Vol restricted to B_{r_max}(𝐨), disk model,
/// sorted by increasing distance to 𝐨.
std::vector<ProductPoint> sample_ppp_ball(double lambda, double r_max, RngStream& rng);

/// Distance to 𝐨 of a point whose first-factor radius is split = ρ out of total r,
/// sampled with density ∝ sinh ρ · sinh(r − ρ) on [0, r].
double sample_radius_split(double r, RngStream& rng);

}  // namespace ipvt
