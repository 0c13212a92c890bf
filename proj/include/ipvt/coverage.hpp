#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "ipvt/corona.hpp"
#include "ipvt/rng.hpp"

namespace ipvt {

/// {(x, y) : (x − a)²(y − b)² <= c(1 + a²)(1 + b²)}.
struct HyperbolicCross {
  double a = 0.0;
  double b = 0.0;
  double c = 1.0;

  /// c(1 + a²)(1 + b²)
  double scale() const { return c * (1.0 + a * a) * (1.0 + b * b); }
};

bool cross_contains(const HyperbolicCross& hc, double x, double y);

struct Disk {
  double cx = 0.0, cy = 0.0;
  double radius = 0.0;
};

bool disk_contains(const Disk& d, double x, double y);

/// Largest disk inside the cross: center (a, b), radius √2·scale^{1/4}.
Disk inscribed_disk(const HyperbolicCross& hc);

/// One atom (Ste Θᵢ, Ste Φᵢ, Rᵢ − R₁) of the deposition process.
struct DepositionEvent {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

/// Direct sampler: Cauchy ⊗ Cauchy marks on the arrivals of a unit-rate process.
std::vector<DepositionEvent> sample_deposition(std::size_t n_events, RngStream& rng);

/// Same law read off a corona sample: rotate the first point to angle 0 in
/// both factors, Cayley-transform, and subtract R₁. Returns R₁ through `r1`.
std::vector<DepositionEvent> deposition_from_corona(const CoronaSample& sample, double& r1);

/// HC(x, y, r1/(r1 + t)), the region of the plane won by the event.
HyperbolicCross event_cross(const DepositionEvent& e, double r1);

/// n×n cell centers on [−L, L]²; a cell counts as covered when its center is.
class CoverageGrid {
 public:
  CoverageGrid(double half_width, std::size_t resolution);

  double half_width() const { return half_width_; }
  std::size_t resolution() const { return n_; }
  double center(std::size_t index) const { return -half_width_ + (static_cast<double>(index) + 0.5) * step_; }
  double step() const { return step_; }
  bool covered(std::size_t row, std::size_t col) const { return covered_[row * n_ + col] != 0; }
  std::uint64_t covered_count() const { return covered_count_; }
  double covered_fraction() const;

  /// Covers every uncovered cell center in row `row` with column index in
  /// [lo, hi] that satisfies `inside(x)`; returns the number newly covered.
  template <class Pred>
  std::size_t cover_row(std::size_t row, std::ptrdiff_t lo, std::ptrdiff_t hi, Pred&& inside);

  bool row_full(std::size_t row) const { return row_uncovered_[row] == 0; }

 private:
  std::size_t find_uncovered(std::size_t row, std::size_t col);

  double half_width_;
  std::size_t n_;
  double step_;
  std::vector<std::uint8_t> covered_;
  std::vector<std::uint64_t> row_uncovered_;
  // Per-row skip pointers: next_[row*(n+1) + j] leads to the first uncovered column >= j.
  std::vector<std::uint32_t> next_;
  std::uint64_t covered_count_ = 0;
};

enum class CoverageMode { crosses, inscribed_disks };

struct CoverageCurve {
  /// Covered cell count after each event.
  std::vector<std::uint64_t> covered;
  std::uint64_t total_cells = 0;

  double fraction(std::size_t event) const {
    return static_cast<double>(covered[event]) / static_cast<double>(total_cells);
  }
  /// First event count (1-based) reaching the target fraction, or 0 if never.
  std::size_t events_to_reach(double fraction) const;
};

/// Applies the events in order to `grid` (which is modified) and records coverage.
CoverageCurve coverage_run(CoverageGrid& grid, double r1, const std::vector<DepositionEvent>& events,
                           CoverageMode mode);

struct BallModelReport {
  double r1 = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t constraint_violations = 0;          ///< ρ⁴ > 4(1 + x²)(1 + y²)
  std::uint64_t loose_constraint_violations = 0;  ///< ρ⁴ > (1 + x²)(1 + y²)
  double fit_lo = 0.0, fit_hi = 0.0;
  std::vector<double> bin_centers;
  std::vector<double> bin_density;
  double fitted_exponent = 0.0;
  double exponent_std_error = 0.0;
  bool passed = false;

  nlohmann::json to_json() const;
};

/// Pushes deposition events through ρ = √2((r1/(r1 + t))(1 + x²)(1 + y²))^{1/4}
/// and fits the log-log slope of the density of ρ/ρ_max(x, y), which should be −5.
BallModelReport ball_model_intensity_check(double r1, std::uint64_t samples, std::uint64_t seed);

struct MushroomReport {
  std::size_t resolution = 0;
  /// Row-major mask over (Re z₁, Re z₂) cell centers; true where the competitor is closer.
  std::vector<std::uint8_t> mask;
  std::size_t line_members = 0;          ///< members on Re z₂ = y
  std::size_t line_members_outside = 0;  ///< members farther than one cell from θᵢ
  /// Same scan through kernel separations at (x₁ + ih, y + ih), h = probe height.
  std::size_t kernel_line_members = 0;
  std::size_t kernel_line_members_outside = 0;
  bool touches_left = false, touches_right = false, touches_bottom = false, touches_top = false;
};

/// Competitor (θᵢ, φᵢ, rᵢ), given by its real boundary coordinates, strictly
/// closer than (∞, y, r1) at the boundary point (x₁, x₂) of the plane.
bool mushroom_member(double x1, double x2, double theta_i, double phi_i, double r_i, double r1, double y);

MushroomReport mushroom_region(double theta_i, double phi_i, double r_i, double r1, double y, double half_width,
                               std::size_t resolution, double probe_height = 1e-6);

}  // namespace ipvt

#include "ipvt/coverage_grid.inl"
