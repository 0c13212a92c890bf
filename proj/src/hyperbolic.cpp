#include "ipvt/hyperbolic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ipvt::hyp {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

// 1 - |z|², computed as (1 - |z|)(1 + |z|).
double one_minus_abs2(Complex z) {
  const double r = std::abs(z);
  return (1.0 - r) * (1.0 + r);
}

}  // namespace

DiskPoint::DiskPoint(Complex z) : z_(z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !(std::abs(z) < 1.0 - kBoundaryGuard))
    throw std::domain_error("DiskPoint: |z| must be < 1 - 1e-14");
}

HalfPlanePoint::HalfPlanePoint(Complex w) : w_(w) {
  if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || !(w.imag() >= kBoundaryGuard))
    throw std::domain_error("HalfPlanePoint: Im w must be >= 1e-14");
}

double normalize_angle(double theta) {
  if (!std::isfinite(theta)) throw std::domain_error("normalize_angle: non-finite angle");
  if (theta >= -kPi && theta < kPi) return theta;
  double t = std::fmod(theta + kPi, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  t -= kPi;
  return t >= kPi ? -kPi : t;
}

double circular_distance(double a, double b) {
  return std::abs(normalize_angle(a - b));
}

BoundaryAngle::BoundaryAngle(double theta) : theta_(normalize_angle(theta)) {}

ExtendedReal::ExtendedReal(double x) : value_(x) {
  if (!std::isfinite(x)) throw std::domain_error("ExtendedReal: use infinity() for the point at infinity");
}

double ExtendedReal::value() const {
  if (!value_) throw std::logic_error("ExtendedReal: value() at infinity");
  return *value_;
}

double dist_h2(const DiskPoint& p, const DiskPoint& q) {
  const double num = std::abs(p.z() - q.z());
  return 2.0 * std::asinh(num / std::sqrt(one_minus_abs2(p.z()) * one_minus_abs2(q.z())));
}

double dist_h2(const HalfPlanePoint& p, const HalfPlanePoint& q) {
  const double num = std::abs(p.w() - q.w());
  return 2.0 * std::asinh(num / (2.0 * std::sqrt(p.w().imag() * q.w().imag())));
}

double dist_from_origin(const DiskPoint& p) { return 2.0 * std::atanh(std::abs(p.z())); }

double kernel_disk(const DiskPoint& z, const BoundaryAngle& theta) {
  // |z - e^{iθ}|² = (1 - |z|)² + 4|z| sin²((θ - arg z)/2), free of cancellation near the boundary.
  const double r = std::abs(z.z());
  const double s = r > 0.0 ? std::sin(0.5 * (theta.theta() - std::arg(z.z()))) : 0.0;
  const double denom = (1.0 - r) * (1.0 - r) + 4.0 * r * s * s;
  return (1.0 - r) * (1.0 + r) / denom;
}

double kernel_halfplane(const HalfPlanePoint& w, const ExtendedReal& x) {
  const double y = w.w().imag();
  if (x.is_infinite()) return y;
  const double xv = x.value();
  return (1.0 + xv * xv) * y / std::norm(w.w() - xv);
}

double kernel_disk_max(const DiskPoint& z) {
  const double r = std::abs(z.z());
  return (1.0 + r) / (1.0 - r);
}

HalfPlanePoint cayley(const DiskPoint& z) {
  return HalfPlanePoint(kI * (1.0 + z.z()) / (1.0 - z.z()));
}

DiskPoint cayley_inverse(const HalfPlanePoint& w) {
  return DiskPoint((w.w() - kI) / (w.w() + kI));
}

ExtendedReal cayley(const BoundaryAngle& theta) {
  if (theta.theta() == 0.0) return ExtendedReal::infinity();
  return ExtendedReal(-1.0 / std::tan(0.5 * theta.theta()));
}

BoundaryAngle cayley_inverse(const ExtendedReal& x) {
  if (x.is_infinite()) return BoundaryAngle(0.0);
  // e^{iθ} = (x - i)/(x + i) = (x - i)²/(x² + 1)
  return BoundaryAngle(2.0 * std::atan2(-1.0, x.value()));
}

Mobius::Mobius(double a, double b, double c, double d, Orientation orientation)
    : orientation_(orientation) {
  const double det = a * d - b * c;
  if (!std::isfinite(det) || det == 0.0) throw std::invalid_argument("Mobius: degenerate matrix (ad - bc = 0)");
  if (det < 0.0) throw std::invalid_argument("Mobius: ad - bc must be positive; use Orientation::reversing");
  const double s = 1.0 / std::sqrt(det);
  a_ = a * s;
  b_ = b * s;
  c_ = c * s;
  d_ = d * s;
  // D = C⁻¹ M C with C = [[i, i], [-1, 1]], C⁻¹ = [[1, -i], [1, i]] / (2i).
  const Complex m00 = a_, m01 = b_, m10 = c_, m11 = d_;
  const Complex p00 = m00 * kI - m01, p01 = m00 * kI + m01;
  const Complex p10 = m10 * kI - m11, p11 = m10 * kI + m11;
  const Complex inv2i = 1.0 / (2.0 * kI);
  alpha_ = (p00 - kI * p10) * inv2i;
  beta_ = (p01 - kI * p11) * inv2i;
  gamma_ = (p00 + kI * p10) * inv2i;
  delta_ = (p01 + kI * p11) * inv2i;
}

Mobius Mobius::disk_rotation(double alpha) {
  const double c = std::cos(0.5 * alpha), s = std::sin(0.5 * alpha);
  return Mobius(c, s, -s, c);
}

Mobius Mobius::disk_boost(double s) {
  if (!(std::abs(s) < 1.0)) throw std::domain_error("disk_boost: |s| must be < 1");
  // In the half-plane, 0 ↦ s in the disk is i ↦ C(s) = i(1+s)/(1-s): scaling by k.
  const double k = (1.0 + s) / (1.0 - s);
  return Mobius(k, 0.0, 0.0, 1.0);
}

Mobius Mobius::to_base_point(const HalfPlanePoint& w) {
  return Mobius(1.0, -w.w().real(), 0.0, w.w().imag());
}

Mobius Mobius::to_base_point(const DiskPoint& z) { return to_base_point(cayley(z)); }

namespace {

// Conjugation by the reflection: R M R = M' with M' = [[a, -b], [-c, d]].
std::array<double, 4> reflect(const std::array<double, 4>& m) { return {m[0], -m[1], -m[2], m[3]}; }

std::array<double, 4> multiply(const std::array<double, 4>& x, const std::array<double, 4>& y) {
  return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
}

}  // namespace

Mobius Mobius::compose(const Mobius& other) const {
  // (M1 R^s1)(M2 R^s2) = M1 (R^s1 M2 R^s1) R^(s1 xor s2)
  const bool s1 = orientation_ == Orientation::reversing;
  const bool s2 = other.orientation_ == Orientation::reversing;
  const auto inner = s1 ? reflect(other.matrix()) : other.matrix();
  const auto m = multiply(matrix(), inner);
  return Mobius(m[0], m[1], m[2], m[3], s1 != s2 ? Orientation::reversing : Orientation::preserving);
}

Mobius Mobius::inverse() const {
  // (M R^s)⁻¹ = R^s M⁻¹ = (R^s M⁻¹ R^s) R^s
  const std::array<double, 4> inv{d_, -b_, -c_, a_};
  const bool s = orientation_ == Orientation::reversing;
  const auto m = s ? reflect(inv) : inv;
  return Mobius(m[0], m[1], m[2], m[3], orientation_);
}

HalfPlanePoint Mobius::apply(const HalfPlanePoint& w) const {
  const Complex v = orientation_ == Orientation::reversing ? -std::conj(w.w()) : w.w();
  return HalfPlanePoint((a_ * v + b_) / (c_ * v + d_));
}

Complex Mobius::disk_map(Complex z) const {
  const Complex v = orientation_ == Orientation::reversing ? std::conj(z) : z;
  return (alpha_ * v + beta_) / (gamma_ * v + delta_);
}

DiskPoint Mobius::apply(const DiskPoint& z) const { return DiskPoint(disk_map(z.z())); }

ExtendedReal Mobius::apply(const ExtendedReal& x) const {
  if (x.is_infinite()) {
    if (c_ == 0.0) return ExtendedReal::infinity();
    return ExtendedReal(a_ / c_);
  }
  const double v = orientation_ == Orientation::reversing ? -x.value() : x.value();
  const double den = c_ * v + d_;
  if (den == 0.0) return ExtendedReal::infinity();
  return ExtendedReal((a_ * v + b_) / den);
}

BoundaryAngle Mobius::apply(const BoundaryAngle& theta) const {
  return BoundaryAngle(std::arg(disk_map(theta.unit())));
}

double Mobius::boundary_derivative(const BoundaryAngle& theta) const {
  const Complex u = theta.unit();
  const Complex v = orientation_ == Orientation::reversing ? std::conj(u) : u;
  const Complex det = alpha_ * delta_ - beta_ * gamma_;
  return std::abs(det) / std::norm(gamma_ * v + delta_);
}

}  // namespace ipvt::hyp
