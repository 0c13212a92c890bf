#include "ipvt/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ipvt/stats.hpp"

namespace ipvt {

bool cross_contains(const HyperbolicCross& hc, double x, double y) {
  const double u = x - hc.a, v = y - hc.b;
  return u * u * v * v <= hc.scale();
}

bool disk_contains(const Disk& d, double x, double y) {
  const double u = x - d.cx, v = y - d.cy;
  return u * u + v * v <= d.radius * d.radius;
}

Disk inscribed_disk(const HyperbolicCross& hc) {
  if (!(hc.c > 0.0)) throw std::invalid_argument("inscribed_disk: c must be > 0");
  return {hc.a, hc.b, std::sqrt(2.0) * std::pow(hc.scale(), 0.25)};
}

std::vector<DepositionEvent> sample_deposition(std::size_t n_events, RngStream& rng) {
  if (n_events == 0) throw std::invalid_argument("sample_deposition: need at least one event");
  std::vector<DepositionEvent> events(n_events);
  double t = 0.0;
  for (auto& e : events) {
    t += rng.exponential();
    e.x = rng.standard_cauchy();
    e.y = rng.standard_cauchy();
    e.t = t;
  }
  return events;
}

std::vector<DepositionEvent> deposition_from_corona(const CoronaSample& sample, double& r1) {
  if (sample.points.size() < 2) throw std::invalid_argument("deposition_from_corona: need at least two corona points");
  const CoronaPoint& first = sample.points.front();
  r1 = first.r();
  // Rotations have unit boundary derivative, so radii are unchanged; Θ₁ ↦ 0 ↦ ∞ under Cayley.
  std::vector<DepositionEvent> events;
  events.reserve(sample.points.size() - 1);
  for (std::size_t i = 1; i < sample.points.size(); ++i) {
    const CoronaPoint& p = sample.points[i];
    const auto x = hyp::cayley(hyp::BoundaryAngle(p.theta_angle() - first.theta_angle()));
    const auto y = hyp::cayley(hyp::BoundaryAngle(p.phi_angle() - first.phi_angle()));
    if (x.is_infinite() || y.is_infinite()) continue;  // probability zero
    events.push_back({x.value(), y.value(), p.r() - r1});
  }
  return events;
}

HyperbolicCross event_cross(const DepositionEvent& e, double r1) { return {e.x, e.y, r1 / (r1 + e.t)}; }

CoverageGrid::CoverageGrid(double half_width, std::size_t resolution)
    : half_width_(half_width), n_(resolution) {
  if (!(half_width > 0.0)) throw std::invalid_argument("CoverageGrid: half-width must be > 0");
  if (resolution == 0 || resolution > (1u << 15)) throw std::invalid_argument("CoverageGrid: resolution out of range");
  step_ = 2.0 * half_width / static_cast<double>(n_);
  covered_.assign(n_ * n_, 0);
  row_uncovered_.assign(n_, n_);
  next_.resize(n_ * (n_ + 1));
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t j = 0; j <= n_; ++j) next_[r * (n_ + 1) + j] = static_cast<std::uint32_t>(j);
}

double CoverageGrid::covered_fraction() const {
  return static_cast<double>(covered_count_) / static_cast<double>(n_ * n_);
}

std::size_t CoverageGrid::find_uncovered(std::size_t row, std::size_t col) {
  std::uint32_t* next = next_.data() + row * (n_ + 1);
  std::size_t root = col;
  while (next[root] != root) root = next[root];
  while (next[col] != root) {
    const std::size_t following = next[col];
    next[col] = static_cast<std::uint32_t>(root);
    col = following;
  }
  return root;
}

std::size_t CoverageCurve::events_to_reach(double target) const {
  for (std::size_t i = 0; i < covered.size(); ++i)
    if (fraction(i) >= target) return i + 1;
  return 0;
}

namespace {

// Column index range whose centers may fall in [x_lo, x_hi], padded by one cell.
std::pair<std::ptrdiff_t, std::ptrdiff_t> column_range(const CoverageGrid& g, double x_lo, double x_hi) {
  const double n = static_cast<double>(g.resolution());
  auto to_index = [&](double x) { return std::clamp((x + g.half_width()) / g.step() - 0.5, -2.0, n + 1.0); };
  return {static_cast<std::ptrdiff_t>(std::floor(to_index(x_lo))) - 1,
          static_cast<std::ptrdiff_t>(std::ceil(to_index(x_hi))) + 1};
}

}  // namespace

CoverageCurve coverage_run(CoverageGrid& grid, double r1, const std::vector<DepositionEvent>& events,
                           CoverageMode mode) {
  if (!(r1 > 0.0)) throw std::invalid_argument("coverage_run: r1 must be > 0");
  if (events.empty()) throw std::invalid_argument("coverage_run: empty event list");
  const std::size_t n = grid.resolution();
  CoverageCurve curve;
  curve.total_cells = static_cast<std::uint64_t>(n) * n;
  curve.covered.reserve(events.size());
  std::vector<std::size_t> active_rows;
  for (std::size_t r = 0; r < n; ++r)
    if (!grid.row_full(r)) active_rows.push_back(r);

  for (std::size_t k = 0; k < events.size(); ++k) {
    if (k > 0 && !(events[k].t >= events[k - 1].t)) throw std::invalid_argument("coverage_run: events must be sorted by t");
    if (grid.covered_count() == curve.total_cells) {
      curve.covered.push_back(curve.total_cells);
      continue;
    }
    const HyperbolicCross hc = event_cross(events[k], r1);
    bool any_row_filled = false;
    if (mode == CoverageMode::crosses) {
      const double root_k = std::sqrt(hc.scale());
      for (std::size_t row : active_rows) {
        const double y = grid.center(row);
        const double v = std::abs(y - hc.b);
        std::pair<std::ptrdiff_t, std::ptrdiff_t> range{0, static_cast<std::ptrdiff_t>(n) - 1};
        if (v > 0.0) {
          const double h = root_k / v;
          range = column_range(grid, hc.a - h, hc.a + h);
        }
        grid.cover_row(row, range.first, range.second, [&](double x) { return cross_contains(hc, x, y); });
        any_row_filled |= grid.row_full(row);
      }
    } else {
      const Disk d = inscribed_disk(hc);
      const auto rows = column_range(grid, d.cy - d.radius, d.cy + d.radius);
      const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n) - 1;
      for (std::ptrdiff_t row = std::max<std::ptrdiff_t>(rows.first, 0); row <= std::min(rows.second, last); ++row) {
        const double y = grid.center(static_cast<std::size_t>(row));
        const double v = y - d.cy;
        const double h2 = d.radius * d.radius - v * v;
        if (h2 < 0.0) continue;
        const double h = std::sqrt(h2);
        const auto range = column_range(grid, d.cx - h, d.cx + h);
        grid.cover_row(static_cast<std::size_t>(row), range.first, range.second,
                       [&](double x) { return disk_contains(d, x, y); });
        any_row_filled |= grid.row_full(static_cast<std::size_t>(row));
      }
    }
    if (any_row_filled)
      std::erase_if(active_rows, [&](std::size_t r) { return grid.row_full(r); });
    curve.covered.push_back(grid.covered_count());
  }
  return curve;
}

BallModelReport ball_model_intensity_check(double r1, std::uint64_t samples, std::uint64_t seed) {
  if (!(r1 > 0.0)) throw std::invalid_argument("ball_model_intensity_check: r1 must be > 0");
  if (samples < 10000) throw std::invalid_argument("ball_model_intensity_check: need at least 1e4 samples");
  BallModelReport rep;
  rep.r1 = r1;
  rep.samples = samples;
  // s = ρ/ρ_max(x, y) = (r1/(r1 + t))^{1/4}. Arrival times in each replica run to
  // ~kEvents, far past t(s_lo) = r1(s_lo⁻⁴ − 1), so the fit window is untruncated.
  constexpr std::size_t kEvents = 100;
  rep.fit_lo = std::max(0.35, std::pow(r1 / (r1 + 0.6 * kEvents), 0.25));
  rep.fit_hi = 0.95;
  constexpr std::size_t kBins = 20;
  const double log_lo = std::log(rep.fit_lo), log_hi = std::log(rep.fit_hi);
  std::vector<std::uint64_t> counts(kBins, 0);
  std::uint64_t produced = 0;
  for (std::uint64_t rep_index = 0; produced < samples; ++rep_index) {
    RngStream rng(seed, rep_index);
    const auto events = sample_deposition(std::min<std::uint64_t>(kEvents, samples - produced), rng);
    for (const auto& e : events) {
      const double q = (1.0 + e.x * e.x) * (1.0 + e.y * e.y);
      const double c = r1 / (r1 + e.t);
      const double rho = std::sqrt(2.0) * std::pow(c * q, 0.25);
      const double rho4 = rho * rho * rho * rho;
      rep.constraint_violations += rho4 > 4.0 * q * (1.0 + 1e-12);
      rep.loose_constraint_violations += rho4 > q;
      const double s = rho / (std::sqrt(2.0) * std::pow(q, 0.25));
      const double ls = std::log(s);
      if (ls >= log_lo && ls < log_hi) {
        const auto b = static_cast<std::size_t>((ls - log_lo) / (log_hi - log_lo) * kBins);
        ++counts[std::min(b, kBins - 1)];
      }
    }
    produced += events.size();
  }
  std::vector<double> lx, ly, w;
  for (std::size_t b = 0; b < kBins; ++b) {
    const double e0 = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(b) / kBins);
    const double e1 = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(b + 1) / kBins);
    const double center = std::sqrt(e0 * e1);
    const double density = static_cast<double>(counts[b]) / (static_cast<double>(samples) * (e1 - e0));
    rep.bin_centers.push_back(center);
    rep.bin_density.push_back(density);
    if (counts[b] > 0) {
      lx.push_back(std::log(center));
      ly.push_back(std::log(density));
      w.push_back(static_cast<double>(counts[b]));  // var(log count) ≈ 1/count
    }
  }
  if (lx.size() >= 3) {
    const auto fit = stats::linear_fit(lx, ly, w);
    rep.fitted_exponent = fit.slope;
    rep.exponent_std_error = fit.slope_std_error;
  }
  rep.passed = rep.constraint_violations == 0 && std::abs(rep.fitted_exponent + 5.0) <= 0.2;
  return rep;
}

nlohmann::json BallModelReport::to_json() const {
  return {{"r1", r1},
          {"samples", samples},
          {"constraint_violations", constraint_violations},
          {"loose_constraint_violations", loose_constraint_violations},
          {"fit_range", {fit_lo, fit_hi}},
          {"bin_centers", bin_centers},
          {"bin_density", bin_density},
          {"fitted_exponent", fitted_exponent},
          {"exponent_std_error", exponent_std_error},
          {"passed", passed}};
}

bool mushroom_member(double x1, double x2, double theta_i, double phi_i, double r_i, double r1, double y) {
  // Strict form of the (∞, y) equal-separation relation, multiplied through by |x₂ − y|².
  const double lhs = (x1 - theta_i) * (x1 - theta_i) * (x2 - phi_i) * (x2 - phi_i) * (1.0 + y * y) * r_i;
  const double rhs = r1 * (1.0 + theta_i * theta_i) * (1.0 + phi_i * phi_i) * (x2 - y) * (x2 - y);
  return lhs < rhs;
}

MushroomReport mushroom_region(double theta_i, double phi_i, double r_i, double r1, double y, double half_width,
                               std::size_t resolution, double probe_height) {
  if (!(r_i > 0.0) || !(r1 > 0.0)) throw std::invalid_argument("mushroom_region: radii must be > 0");
  if (!(half_width > 0.0) || resolution < 2) throw std::invalid_argument("mushroom_region: invalid grid");
  if (!(probe_height > 0.0)) throw std::invalid_argument("mushroom_region: probe height must be > 0");
  MushroomReport rep;
  rep.resolution = resolution;
  rep.mask.assign(resolution * resolution, 0);
  const double step = 2.0 * half_width / static_cast<double>(resolution);
  auto center = [&](std::size_t i) { return -half_width + (static_cast<double>(i) + 0.5) * step; };
  for (std::size_t row = 0; row < resolution; ++row)
    for (std::size_t col = 0; col < resolution; ++col)
      rep.mask[row * resolution + col] = mushroom_member(center(col), center(row), theta_i, phi_i, r_i, r1, y);
  for (std::size_t col = 0; col < resolution; ++col) {
    const double x1 = center(col);
    if (!mushroom_member(x1, y, theta_i, phi_i, r_i, r1, y)) continue;
    ++rep.line_members;
    if (std::abs(x1 - theta_i) > step) ++rep.line_members_outside;
  }
  const CoronaPoint first(hyp::ExtendedReal::infinity(), hyp::ExtendedReal(y), r1);
  const CoronaPoint other(hyp::ExtendedReal(theta_i), hyp::ExtendedReal(phi_i), r_i);
  for (std::size_t col = 0; col < resolution; ++col) {
    const double x1 = center(col);
    const ProductPoint z{hyp::HalfPlanePoint({x1, probe_height}), hyp::HalfPlanePoint({y, probe_height})};
    if (!(separation(z, other) < separation(z, first))) continue;
    ++rep.kernel_line_members;
    if (std::abs(x1 - theta_i) > step) ++rep.kernel_line_members_outside;
  }
  for (std::size_t i = 0; i < resolution; ++i) {
    rep.touches_bottom |= rep.mask[i] != 0;
    rep.touches_top |= rep.mask[(resolution - 1) * resolution + i] != 0;
    rep.touches_left |= rep.mask[i * resolution] != 0;
    rep.touches_right |= rep.mask[i * resolution + resolution - 1] != 0;
  }
  return rep;
}

}  // namespace ipvt
