#pragma once

#include <array>
#include <complex>
#include <optional>

namespace ipvt::hyp {

using Complex = std::complex<double>;

/// Points closer than this to the ideal boundary are rejected.
inline constexpr double kBoundaryGuard = 1e-14;

enum class Model { disk, halfplane };

/// Interior point of the Poincaré disk, |z| < 1 - kBoundaryGuard.
class DiskPoint {
 public:
  explicit DiskPoint(Complex z);
  Complex z() const { return z_; }

 private:
  Complex z_;
};

/// Interior point of the upper half-plane, Im w >= kBoundaryGuard.
class HalfPlanePoint {
 public:
  explicit HalfPlanePoint(Complex w);
  Complex w() const { return w_; }

 private:
  Complex w_;
};

/// Wraps any finite angle to [-pi, pi).
double normalize_angle(double theta);
/// Length of the shorter arc between two angles, in [0, pi].
double circular_distance(double a, double b);

/// Point of the disk boundary, stored as a normalized angle.
class BoundaryAngle {
 public:
  explicit BoundaryAngle(double theta);
  double theta() const { return theta_; }
  Complex unit() const { return std::polar(1.0, theta_); }

 private:
  double theta_;
};

/// Point of the extended real line R ∪ {∞}, the half-plane boundary.
class ExtendedReal {
 public:
  static ExtendedReal infinity() { return ExtendedReal(); }
  explicit ExtendedReal(double x);

  bool is_infinite() const { return !value_.has_value(); }
  /// Throws std::logic_error at infinity.
  double value() const;

  friend bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

 private:
  ExtendedReal() = default;
  std::optional<double> value_;
};

double dist_h2(const DiskPoint& p, const DiskPoint& q);
double dist_h2(const HalfPlanePoint& p, const HalfPlanePoint& q);

/// Distance from the disk center, 2·artanh|z|.
double dist_from_origin(const DiskPoint& p);

/// K(z, θ) = (1 - |z|²) / |z - e^{iθ}|².
double kernel_disk(const DiskPoint& z, const BoundaryAngle& theta);

/// K̂(w, x) = (1 + x²)·Im w / |w - x|², and K̂(w, ∞) = Im w.
///
/// Normalized so that K̂(i, x) = 1; with the Cayley convention below,
/// K̂(C(z), Ste(θ)) = K(z, θ) exactly (constant 1).
double kernel_halfplane(const HalfPlanePoint& w, const ExtendedReal& x);

/// max over θ of K(z, θ) = (1 + |z|)/(1 - |z|) = exp(d(z, 0)).
double kernel_disk_max(const DiskPoint& z);

/// Cayley transform C(z) = i(1 + z)/(1 - z): disk -> half-plane, 0 ↦ i.
HalfPlanePoint cayley(const DiskPoint& z);
DiskPoint cayley_inverse(const HalfPlanePoint& w);
/// Boundary action Ste(θ) = -cot(θ/2); θ = 0 ↦ ∞.
ExtendedReal cayley(const BoundaryAngle& theta);
BoundaryAngle cayley_inverse(const ExtendedReal& x);

enum class Orientation { preserving, reversing };

/// Isometry of H² as a real 2×2 matrix acting on the half-plane, optionally
/// preceded by the reflection w ↦ -w̄. The disk action is the Cayley
/// conjugate; the reflection corresponds to z ↦ z̄ there.
///
/// The matrix is normalized to ad - bc = 1; matrices with ad - bc <= 0 are
/// rejected.
class Mobius {
 public:
  Mobius(double a, double b, double c, double d, Orientation orientation = Orientation::preserving);

  static Mobius identity() { return Mobius(1, 0, 0, 1); }
  /// z ↦ e^{iα} z in the disk.
  static Mobius disk_rotation(double alpha);
  /// Hyperbolic translation along the real diameter of the disk sending 0 to s in (-1, 1).
  static Mobius disk_boost(double s);
  /// An isometry sending w to i in the half-plane, equivalently C⁻¹(w) to 0 in the disk.
  static Mobius to_base_point(const HalfPlanePoint& w);
  static Mobius to_base_point(const DiskPoint& z);
  /// w ↦ -w̄ in the half-plane, z ↦ z̄ in the disk.
  static Mobius reflection() { return Mobius(1, 0, 0, 1, Orientation::reversing); }

  std::array<double, 4> matrix() const { return {a_, b_, c_, d_}; }
  Orientation orientation() const { return orientation_; }

  /// (this ∘ other)(p) = this(other(p)).
  Mobius compose(const Mobius& other) const;
  Mobius inverse() const;

  HalfPlanePoint apply(const HalfPlanePoint& w) const;
  DiskPoint apply(const DiskPoint& z) const;
  ExtendedReal apply(const ExtendedReal& x) const;
  BoundaryAngle apply(const BoundaryAngle& theta) const;

  /// |φ'(θ)| of the induced map on the unit circle.
  double boundary_derivative(const BoundaryAngle& theta) const;

 private:
  Complex disk_map(Complex z) const;

  double a_, b_, c_, d_;
  Orientation orientation_;
  // Cayley conjugate acting on the disk: z ↦ (α z + β)/(γ z + δ).
  Complex alpha_, beta_, gamma_, delta_;
};

}  // namespace ipvt::hyp
