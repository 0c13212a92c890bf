#include "ipvt/corona.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ipvt {

using hyp::BoundaryAngle;
using hyp::DiskPoint;
using hyp::ExtendedReal;
using hyp::HalfPlanePoint;

namespace {

void check_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("CoronaPoint: radius must be finite and > 0");
}

double kernel(Complex z, const BoundaryCoord& b, Model model) {
  if (model == Model::disk) return hyp::kernel_disk(DiskPoint(z), std::get<BoundaryAngle>(b));
  return hyp::kernel_halfplane(HalfPlanePoint(z), std::get<ExtendedReal>(b));
}

}  // namespace

CoronaPoint::CoronaPoint(BoundaryAngle theta, BoundaryAngle phi, double r)
    : model_(Model::disk), theta_(theta), phi_(phi), r_(r) {
  check_radius(r);
}

CoronaPoint::CoronaPoint(ExtendedReal theta, ExtendedReal phi, double r)
    : model_(Model::halfplane), theta_(theta), phi_(phi), r_(r) {
  check_radius(r);
}

double CoronaPoint::theta_angle() const {
  if (model_ != Model::disk) throw std::invalid_argument("CoronaPoint: not in the disk model");
  return std::get<BoundaryAngle>(theta_).theta();
}

double CoronaPoint::phi_angle() const {
  if (model_ != Model::disk) throw std::invalid_argument("CoronaPoint: not in the disk model");
  return std::get<BoundaryAngle>(phi_).theta();
}

CoronaPoint CoronaPoint::with_radius(double r) const {
  CoronaPoint out = *this;
  check_radius(r);
  out.r_ = r;
  return out;
}

CoronaPoint CoronaPoint::to_model(Model target) const {
  if (target == model_) return *this;
  if (target == Model::halfplane)
    return {hyp::cayley(std::get<BoundaryAngle>(theta_)), hyp::cayley(std::get<BoundaryAngle>(phi_)), r_};
  return {hyp::cayley_inverse(std::get<ExtendedReal>(theta_)), hyp::cayley_inverse(std::get<ExtendedReal>(phi_)), r_};
}

namespace {

void append_uniform_points(std::vector<CoronaPoint>& points, double lo, double hi, RngStream& rng) {
  // Unit-rate process on (lo, hi]: exponential gaps, angles drawn per point.
  double r = lo;
  while (true) {
    r += rng.exponential();
    if (r > hi) break;
    if (!points.empty() && !(r > points.back().r())) continue;  // probability-zero tie
    const double theta = rng.angle();
    const double phi = rng.angle();
    points.emplace_back(BoundaryAngle(theta), BoundaryAngle(phi), r);
  }
}

}  // namespace

CoronaSample sample_corona(double r_cutoff, RngStream& rng) {
  if (!(r_cutoff > 0.0) || !std::isfinite(r_cutoff)) throw std::invalid_argument("sample_corona: r_cutoff must be > 0");
  CoronaSample sample;
  sample.r_cutoff = r_cutoff;
  sample.points.reserve(static_cast<std::size_t>(r_cutoff + 4.0 * std::sqrt(r_cutoff) + 8.0));
  append_uniform_points(sample.points, 0.0, r_cutoff, rng);
  return sample;
}

CoronaSample extend_corona(const CoronaSample& sample, double new_cutoff, RngStream& rng) {
  if (!(new_cutoff >= sample.r_cutoff)) throw std::invalid_argument("extend_corona: cutoff must not shrink");
  CoronaSample out = sample;
  out.r_cutoff = new_cutoff;
  append_uniform_points(out.points, sample.r_cutoff, new_cutoff, rng);
  return out;
}

double separation(const ProductPoint& z, const CoronaPoint& p) {
  if (z.model() != p.model()) throw std::invalid_argument("separation: model mismatch");
  return p.r() / (kernel(z.first(), p.theta(), z.model()) * kernel(z.second(), p.phi(), z.model()));
}

CoronaPoint corona_isometry_apply(const ProductIsometry& g, const CoronaPoint& p) {
  if (p.model() != Model::disk) throw std::invalid_argument("corona_isometry_apply: disk model required");
  const BoundaryAngle theta = std::get<BoundaryAngle>(p.theta());
  const BoundaryAngle phi = std::get<BoundaryAngle>(p.phi());
  const DiskPoint pre1 = g.g1().inverse().apply(DiskPoint(0.0));
  const DiskPoint pre2 = g.g2().inverse().apply(DiskPoint(0.0));
  const double r = p.r() / (hyp::kernel_disk(pre1, theta) * hyp::kernel_disk(pre2, phi));
  const BoundaryAngle a = g.g1().apply(theta);
  const BoundaryAngle b = g.g2().apply(phi);
  return g.swap() ? CoronaPoint(b, a, r) : CoronaPoint(a, b, r);
}

double separation_lower_bound(const ProductPoint& z, double r) {
  return r * std::exp(-dist_l1(z, ProductPoint::origin(z.model())));
}

CellAssignment cell_assign(const ProductPoint& z, const CoronaSample& sample) {
  if (sample.points.empty()) throw std::invalid_argument("cell_assign: empty sample");
  const double decay = std::exp(-dist_l1(z, ProductPoint::origin(z.model())));
  constexpr double inf = std::numeric_limits<double>::infinity();
  double best = inf, second = inf;
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < sample.points.size(); ++i) {
    const CoronaPoint& p = sample.points[i];
    // Radii increase, so once r·decay passes the runner-up nothing later can matter.
    if (p.r() * decay * (1.0 - 1e-12) > second) break;
    const double s = separation(z, p);
    if (s < best) {
      second = best;
      best = s;
      best_index = i;
    } else if (s < second) {
      second = s;
    }
  }
  CellAssignment out;
  out.index = best_index;
  out.separation = best;
  out.margin = second - best;
  out.certified = best < sample.r_cutoff * decay * (1.0 - 1e-12);
  return out;
}

bool nml_predicate(const ProductPoint& z, const CoronaPoint& p, const CoronaPoint& q, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("nml_predicate: tolerance must be > 0");
  const double a = separation(z, p);
  const double b = separation(z, q);
  return std::abs(a - b) <= tol * std::max(a, b);
}

namespace {

struct FinitePair {
  double theta, phi;
};

FinitePair finite_coords(const CoronaPoint& q) {
  if (q.model() != Model::halfplane) throw std::invalid_argument("NML closed form: half-plane model required");
  const auto& t = std::get<ExtendedReal>(q.theta());
  const auto& f = std::get<ExtendedReal>(q.phi());
  if (t.is_infinite() || f.is_infinite()) throw std::invalid_argument("NML closed form: competitor must be finite");
  return {t.value(), f.value()};
}

}  // namespace

double nml_residual_inf_inf(const ProductPoint& z, double r1, const CoronaPoint& q) {
  if (z.model() != Model::halfplane) throw std::invalid_argument("nml_residual_inf_inf: half-plane model required");
  const auto [theta, phi] = finite_coords(q);
  return std::norm(z.first() - theta) * std::norm(z.second() - phi) -
         (r1 / q.r()) * (1.0 + theta * theta) * (1.0 + phi * phi);
}

double nml_residual_inf_y(const ProductPoint& z, double y, double r1, const CoronaPoint& q) {
  if (z.model() != Model::halfplane) throw std::invalid_argument("nml_residual_inf_y: half-plane model required");
  const auto [theta, phi] = finite_coords(q);
  return std::norm(z.first() - theta) * std::norm(z.second() - phi) * (1.0 + y * y) * q.r() -
         r1 * (1.0 + theta * theta) * (1.0 + phi * phi) * std::norm(z.second() - y);
}

namespace {

// Log-ratio contribution of one factor: log K(z, b) − log K(z, a).
struct FactorGrid {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  Complex lo_at{}, hi_at{};
};

Complex from_centered(Complex w, double rho) { return (w + rho) / (1.0 + rho * w); }

double factor_term(Complex z, const BoundaryAngle& beats, const BoundaryAngle& loses) {
  const DiskPoint p(z);
  return std::log(hyp::kernel_disk(p, beats)) - std::log(hyp::kernel_disk(p, loses));
}

FactorGrid scan_factor(double rho, const BoundaryAngle& beats, const BoundaryAngle& loses,
                       const NmlProbeOptions& o) {
  FactorGrid g;
  const double outer = std::tanh(0.5 * o.patch_radius);
  auto visit = [&](Complex w) {
    const double v = factor_term(from_centered(w, rho), beats, loses);
    if (v < g.lo) {
      g.lo = v;
      g.lo_at = w;
    }
    if (v > g.hi) {
      g.hi = v;
      g.hi_at = w;
    }
  };
  visit(0.0);
  for (std::size_t i = 1; i <= o.radial_steps; ++i) {
    const double s = outer * static_cast<double>(i) / static_cast<double>(o.radial_steps);
    for (std::size_t j = 0; j < o.angular_steps; ++j)
      visit(std::polar(s, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(o.angular_steps)));
  }
  return g;
}

}  // namespace

std::vector<NmlWitness> nml_unbounded_probe(const CoronaPoint& p, const CoronaPoint& q,
                                            const std::vector<double>& t_grid, const NmlProbeOptions& options) {
  if (p.model() != Model::disk || q.model() != Model::disk)
    throw std::invalid_argument("nml_unbounded_probe: disk model required");
  if (!(options.patch_radius > 0.0) || options.radial_steps == 0 || options.angular_steps == 0)
    throw std::invalid_argument("nml_unbounded_probe: invalid search grid");
  const auto tp = std::get<BoundaryAngle>(p.theta()), fp = std::get<BoundaryAngle>(p.phi());
  const auto tq = std::get<BoundaryAngle>(q.theta()), fq = std::get<BoundaryAngle>(q.phi());
  // log sep_p − log sep_q = log(r_p/r_q) + [log K(z₁,θq) − log K(z₁,θp)] + [log K(z₂,φq) − log K(z₂,φp)]
  const double base = std::log(p.r() / q.r());
  std::vector<NmlWitness> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw std::invalid_argument("nml_unbounded_probe: t must be >= 0");
    const double rho = std::tanh(0.5 * t);
    const FactorGrid g1 = scan_factor(rho, tq, tp, options);
    const FactorGrid g2 = scan_factor(rho, fq, fp, options);
    NmlWitness w;
    w.t = t;
    const double lo = base + g1.lo + g2.lo;
    const double hi = base + g1.hi + g2.hi;
    if (lo <= 0.0 && hi >= 0.0) {
      auto h = [&](double s, Complex& z1, Complex& z2) {
        z1 = from_centered((1.0 - s) * g1.lo_at + s * g1.hi_at, rho);
        z2 = from_centered((1.0 - s) * g2.lo_at + s * g2.hi_at, rho);
        return base + factor_term(z1, tq, tp) + factor_term(z2, fq, fp);
      };
      double a = 0.0, b = 1.0;
      Complex z1, z2;
      for (std::size_t k = 0; k < options.bisection_steps; ++k) {
        const double m = 0.5 * (a + b);
        if (h(m, z1, z2) <= 0.0)
          a = m;
        else
          b = m;
      }
      h(0.5 * (a + b), z1, z2);
      w.point = ProductPoint(DiskPoint(z1), DiskPoint(z2));
      w.bracket = b - a;
    }
    out.push_back(w);
  }
  return out;
}

void write_corona_csv(std::ostream& out, const CoronaSample& sample) {
  out << "theta,phi,r\n";
  out << std::setprecision(17);
  for (const auto& p : sample.points) out << p.theta_angle() << ',' << p.phi_angle() << ',' << p.r() << '\n';
}

CoronaSample read_corona_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "theta,phi,r")
    throw std::runtime_error("read_corona_csv: missing header 'theta,phi,r'");
  CoronaSample sample;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    double v[3];
    char comma = 0;
    if (!(fields >> v[0] >> comma) || comma != ',' || !(fields >> v[1] >> comma) || comma != ',' || !(fields >> v[2]))
      throw std::runtime_error("read_corona_csv: malformed row " + std::to_string(row));
    if (!sample.points.empty() && !(v[2] > sample.points.back().r()))
      throw std::runtime_error("read_corona_csv: radii must be strictly increasing (row " + std::to_string(row) + ")");
    sample.points.emplace_back(BoundaryAngle(v[0]), BoundaryAngle(v[1]), v[2]);
  }
  // The file carries no cutoff; the sample is known exact up to its largest radius.
  sample.r_cutoff = sample.points.empty() ? 0.0 : sample.points.back().r();
  return sample;
}

}  // namespace ipvt
