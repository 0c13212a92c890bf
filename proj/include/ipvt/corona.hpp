#pragma once

#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "ipvt/product_space.hpp"

namespace ipvt {

/// Boundary coordinate of a corona point: an angle (disk model) or an
/// extended real (half-plane model).
using BoundaryCoord = std::variant<hyp::BoundaryAngle, hyp::ExtendedReal>;

/// (θ, φ, r): two boundary directions and a positive radius.
class CoronaPoint {
 public:
  CoronaPoint(hyp::BoundaryAngle theta, hyp::BoundaryAngle phi, double r);
  CoronaPoint(hyp::ExtendedReal theta, hyp::ExtendedReal phi, double r);

  Model model() const { return model_; }
  const BoundaryCoord& theta() const { return theta_; }
  const BoundaryCoord& phi() const { return phi_; }
  double r() const { return r_; }

  /// Angles; throw unless in the disk model.
  double theta_angle() const;
  double phi_angle() const;

  CoronaPoint with_radius(double r) const;
  /// Cayley transform of both boundary coordinates; r unchanged.
  CoronaPoint to_model(Model target) const;

 private:
  Model model_;
  BoundaryCoord theta_, phi_;
  double r_;
};

/// Corona points with r <= r_cutoff, disk model, strictly increasing radii.
struct CoronaSample {
  std::vector<CoronaPoint> points;
  double r_cutoff = 0.0;
};

/// Unit-rate Poisson process on [0, r_cutoff] with i.i.d. uniform angles.
CoronaSample sample_corona(double r_cutoff, RngStream& rng);

/// Adds the points with radius in (sample.r_cutoff, new_cutoff], leaving the
/// existing ones untouched.
CoronaSample extend_corona(const CoronaSample& sample, double new_cutoff, RngStream& rng);

/// sep(z, (θ, φ, r)) = r / (K(z₁, θ) K(z₂, φ)) with the model's kernel.
double separation(const ProductPoint& z, const CoronaPoint& p);

/// Isometry action on the corona (disk model):
/// (θ, φ, r) ↦ (g₁θ, g₂φ, r / (K(g₁⁻¹𝐨, θ) K(g₂⁻¹𝐨, φ))), then the factor swap.
CoronaPoint corona_isometry_apply(const ProductIsometry& g, const CoronaPoint& p);

struct CellAssignment {
  std::size_t index = 0;
  double separation = 0.0;
  /// Runner-up separation minus winner separation; infinite for a one-point sample.
  double margin = 0.0;
  /// True when no unseen point (r > r_cutoff) can beat the winner.
  bool certified = false;
};

/// Minimal-separation corona point for z. Ties go to the lower index.
///
/// Any point beyond the cutoff has separation at least
/// r_cutoff · exp(−d(z, 𝐨)), since max_θ K(z, θ) = exp(d(z, 𝐨)) per factor.
CellAssignment cell_assign(const ProductPoint& z, const CoronaSample& sample);

/// Lower bound on the separation of any corona point of radius >= r from z.
double separation_lower_bound(const ProductPoint& z, double r);

inline constexpr double kDefaultTieTolerance = 1e-9;

/// |sep(z,p) − sep(z,q)| <= tol · max(sep(z,p), sep(z,q)).
bool nml_predicate(const ProductPoint& z, const CoronaPoint& p, const CoronaPoint& q,
                   double tol = kDefaultTieTolerance);

/// Closed form of the equal-separation surface against a point sent to
/// (∞, ∞, r₁): |z₁−θ|²|z₂−φ|² − (r₁/r)(1+θ²)(1+φ²). Zero on the surface;
/// negative where (θ, φ, r) has the smaller separation.
double nml_residual_inf_inf(const ProductPoint& z, double r1, const CoronaPoint& q);

/// Same against (∞, y, r₁), multiplied through by |z₂ − y|²:
/// |z₁−θ|²|z₂−φ|²(1+y²) r − r₁(1+θ²)(1+φ²)|z₂−y|².
double nml_residual_inf_y(const ProductPoint& z, double y, double r1, const CoronaPoint& q);

struct NmlWitness {
  double t = 0.0;
  /// Point where sep(·, p) = sep(·, q) up to the bisection tolerance.
  std::optional<ProductPoint> point;
  /// Width of the final bisection bracket, as a fraction of the search path.
  double bracket = 0.0;
};

struct NmlProbeOptions {
  /// Hyperbolic radius of the per-factor search disk around the traveler.
  double patch_radius = 2.0;
  std::size_t radial_steps = 12;
  std::size_t angular_steps = 24;
  std::size_t bisection_steps = 60;
};

/// For each t in `t_grid`, searches the product of two hyperbolic disks
/// around the traveler tanh(t/2)·(1, 1) for a point of equal separation to
/// p and q. Entries without a sign change carry no point.
std::vector<NmlWitness> nml_unbounded_probe(const CoronaPoint& p, const CoronaPoint& q,
                                            const std::vector<double>& t_grid,
                                            const NmlProbeOptions& options = {});

/// CSV with header "theta,phi,r", one row per point in sample order.
void write_corona_csv(std::ostream& out, const CoronaSample& sample);
CoronaSample read_corona_csv(std::istream& in);

}  // namespace ipvt
