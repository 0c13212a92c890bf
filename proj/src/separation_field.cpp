#include "ipvt/separation_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ipvt/parallel.hpp"

namespace ipvt {

using hyp::BoundaryAngle;
using hyp::DiskPoint;

namespace {

constexpr double kPi = std::numbers::pi;

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("epsilon must lie in (0, 1)");
}

// 1 − cos x without cancellation.
double one_minus_cos(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;
}

}  // namespace

TravelerState TravelerState::at_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::domain_error("TravelerState: t must be finite and >= 0");
  const double rho = std::tanh(0.5 * t);
  return {t, 1.0 - rho, rho};
}

TravelerState TravelerState::at_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::domain_error("TravelerState: epsilon must lie in (0, 1]");
  const double rho = 1.0 - epsilon;
  return {2.0 * std::atanh(rho), epsilon, rho};
}

ProductPoint TravelerState::position() const { return {DiskPoint(rho_), DiskPoint(rho_)}; }

double f1(double e) {
  const double q = e / (2.0 - e);
  return q * q;
}

double f2(double e) { return (1.0 - e) / ((2.0 - e) * (2.0 - e)); }

double f3(double e) {
  const double q = (1.0 - e) / (e * (2.0 - e));
  return q * q;
}

double f3_uncorrected(double e) { return (1.0 - e) / (2.0 * e * e * (2.0 - e) * (2.0 - e)); }

double separation_expansion(const TravelerState& state, double theta, double phi, double r,
                            CrossCoefficient coefficient) {
  const double e = state.epsilon();
  check_epsilon(e);
  if (!(r > 0.0)) throw std::invalid_argument("separation_expansion: r must be > 0");
  const double a = one_minus_cos(theta), b = one_minus_cos(phi);
  const double cross = coefficient == CrossCoefficient::corrected ? f3(e) : f3_uncorrected(e);
  return r * (f1(e) + 2.0 * f2(e) * (a + b) + 4.0 * cross * a * b);
}

namespace {

Complex offset_point(double epsilon, std::complex<double> offset) {
  if (!(offset.real() > 0.5 * epsilon * std::norm(offset)))
    throw std::invalid_argument("rescaled_field_sample: offset violates Re(eta) > eps*|eta|^2/2");
  return 1.0 - epsilon * offset;
}

// Angle bins around arg z with the kernel maximum on each bin; the bin
// closest to arg z carries K at its inner edge since K decreases away from it.
class AngleEnvelope {
 public:
  explicit AngleEnvelope(Complex z) : rho_(std::abs(z)), center_(rho_ > 0.0 ? std::arg(z) : 0.0) {
    const DiskPoint point(z);
    std::vector<double> edges{0.0};
    const double scale = std::max(1.0 - rho_, 1e-300);
    for (int k = 1; k <= 20 && scale * k / 20.0 < kPi; ++k) edges.push_back(scale * k / 20.0);
    while (edges.back() * 1.05 < kPi) edges.push_back(edges.back() * 1.05);
    edges.push_back(kPi);
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const double peak = hyp::kernel_disk(point, BoundaryAngle(center_ + edges[k]));
      const double mass = (edges[k + 1] - edges[k]) / (2.0 * kPi) * peak;
      for (int side : {1, -1}) {
        bins_.push_back({edges[k], edges[k + 1], side, peak});
        total_ += mass;
        cumulative_.push_back(total_);
      }
    }
  }

  /// ∫ of the bound against the uniform probability measure.
  double total() const { return total_; }

  /// Angle drawn with density proportional to the bound; `peak` receives the bound there.
  double sample(RngStream& rng, double& peak) const {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), total_ * rng.uniform());
    const Bin& b = bins_[std::min<std::size_t>(it - cumulative_.begin(), bins_.size() - 1)];
    peak = b.peak;
    return hyp::normalize_angle(center_ + b.side * rng.uniform(b.lo, b.hi));
  }

 private:
  struct Bin {
    double lo, hi;
    int side;
    double peak;
  };
  double rho_, center_;
  std::vector<Bin> bins_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

void sort_by_y(std::vector<SeparationSample>& atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const auto& l, const auto& r) { return l.y < r.y; });
}

}  // namespace

std::vector<SeparationSample> rescaled_field_sample(double epsilon, std::complex<double> eta,
                                                    std::complex<double> xi, double y_max, RngStream& rng,
                                                    FieldSampler sampler) {
  check_epsilon(epsilon);
  if (!(y_max > 0.0)) throw std::invalid_argument("rescaled_field_sample: y_max must be > 0");
  const Complex z1 = offset_point(epsilon, eta);
  const Complex z2 = offset_point(epsilon, xi);
  const ProductPoint z{DiskPoint(z1), DiskPoint(z2)};
  std::vector<SeparationSample> atoms;
  if (sampler == FieldSampler::envelope) {
    // Envelope measure dθ/2π ⊗ dφ/2π ⊗ dr on {r <= y_max·M₁(θ)M₂(φ)} contains {sep <= y_max}.
    const AngleEnvelope env1(z1), env2(z2);
    const std::uint64_t count = rng.poisson(y_max * env1.total() * env2.total());
    for (std::uint64_t i = 0; i < count; ++i) {
      double m1 = 0.0, m2 = 0.0;
      const double theta = env1.sample(rng, m1);
      const double phi = env2.sample(rng, m2);
      const double r = y_max * m1 * m2 * rng.uniform();
      const double y = separation(z, CoronaPoint(BoundaryAngle(theta), BoundaryAngle(phi), r));
      if (y <= y_max) atoms.push_back({theta / epsilon, phi / epsilon, y});
    }
  } else {
    const double r_cut = y_max * std::exp(dist_l1(z, ProductPoint::origin(Model::disk)));
    if (r_cut > 2e8) throw std::invalid_argument("rescaled_field_sample: truncated sampler needs too many corona points");
    const CoronaSample corona = sample_corona(r_cut, rng);
    for (const auto& p : corona.points) {
      const double y = separation(z, p);
      if (y <= y_max) atoms.push_back({p.theta_angle() / epsilon, p.phi_angle() / epsilon, y});
    }
  }
  sort_by_y(atoms);
  return atoms;
}

std::vector<SeparationSample> rescaled_field_sample(const TravelerState& state, double y_max, RngStream& rng,
                                                    FieldSampler sampler) {
  return rescaled_field_sample(state.epsilon(), 1.0, 1.0, y_max, rng, sampler);
}

std::vector<SeparationSample> limit_field_sample(std::complex<double> eta, std::complex<double> xi, double y_max,
                                                 RngStream& rng, double rate) {
  if (!(eta.real() > 0.0) || !(xi.real() > 0.0))
    throw std::invalid_argument("limit_field_sample: Re(eta) and Re(xi) must be > 0");
  if (!(y_max > 0.0) || !(rate > 0.0)) throw std::invalid_argument("limit_field_sample: y_max and rate must be > 0");
  const std::uint64_t count = rng.poisson(rate * y_max);
  std::vector<SeparationSample> atoms;
  atoms.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double y = y_max * rng.uniform();
    const double theta_hat = -eta.imag() + eta.real() * rng.standard_cauchy();
    const double phi_hat = -xi.imag() + xi.real() * rng.standard_cauchy();
    atoms.push_back({theta_hat, phi_hat, y});
  }
  sort_by_y(atoms);
  return atoms;
}

double tiebreak_constant() { return 0.5 + 2.0 / (kPi * kPi); }

TiebreakEstimate tiebreak_estimate(TiebreakMethod method, std::uint64_t n, std::uint64_t seed, unsigned threads,
                                   std::uint64_t stream_offset) {
  if (n < 10000) throw std::invalid_argument("tiebreak_estimate: need n >= 1e4");
  constexpr std::uint64_t kChunk = 1u << 20;
  const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_for(chunks, threads, [&](std::uint64_t c) {
    RngStream rng(seed, stream_offset + c);
    const std::uint64_t begin = c * kChunk, end = std::min(n, begin + kChunk);
    std::uint64_t h = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
      if (method == TiebreakMethod::direct_z) {
        const double u = rng.uniform();
        const double b1 = 0.5 * one_minus_cos(rng.angle());
        const double b2 = 0.5 * one_minus_cos(rng.angle());
        h += u * b1 <= b2;
      } else {
        const double phi1 = rng.angle();
        const double theta2 = rng.angle();
        const double r1 = rng.exponential();
        const double r2 = r1 + rng.exponential();
        h += r1 * one_minus_cos(phi1) <= r2 * one_minus_cos(theta2);
      }
    }
    hits[c] = h;
  });
  TiebreakEstimate out;
  out.method = method;
  out.n = n;
  for (auto h : hits) out.hits += h;
  out.estimate = stats::proportion(out.hits, n);
  out.ci_lo = out.estimate.mean - 1.96 * out.estimate.std_error;
  out.ci_hi = out.estimate.mean + 1.96 * out.estimate.std_error;
  return out;
}

EndProbeVerdict probe_ray(const CoronaSample& sample, double tau1, double tau2, const std::vector<double>& t_grid,
                          bool stop_at_exit) {
  if (sample.points.size() < 2) throw std::invalid_argument("probe_ray: sample needs at least two points");
  EndProbeVerdict verdict;
  const Complex u1 = std::polar(1.0, tau1), u2 = std::polar(1.0, tau2);
  for (double t : t_grid) {
    if (!(t >= 0.0)) throw std::invalid_argument("probe_ray: t must be >= 0");
    const double rho = std::tanh(0.5 * t);
    const ProductPoint z{DiskPoint(rho * u1), DiskPoint(rho * u2)};
    const CellAssignment a = cell_assign(z, sample);
    verdict.steps.push_back({t, a.index, a.certified});
    if (a.certified && a.index != 0 && !verdict.exits) {
      verdict.exits = true;
      verdict.exit_t = t;
      if (stop_at_exit) break;
    }
  }
  return verdict;
}

EndProbeVerdict end_of_cell_probe(const CoronaSample& sample, double tau1, double tau2,
                                  const std::vector<double>& t_grid, double delta, bool stop_at_exit) {
  if (sample.points.size() < 2) throw std::invalid_argument("end_of_cell_probe: sample needs at least two points");
  const CoronaPoint& first = sample.points.front();
  if (hyp::circular_distance(tau1, first.theta_angle()) <= delta ||
      hyp::circular_distance(tau2, first.phi_angle()) <= delta)
    throw std::invalid_argument("end_of_cell_probe: direction lies within delta of the end of the zero cell");
  return probe_ray(sample, tau1, tau2, t_grid, stop_at_exit);
}

}  // namespace ipvt
