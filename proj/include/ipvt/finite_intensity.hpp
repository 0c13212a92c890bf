#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "ipvt/product_space.hpp"
#include "ipvt/stats.hpp"

namespace ipvt {

/// Nuclei of a finite-intensity Poisson–Voronoi diagram, sorted by distance to 𝐨.
struct NucleiSet {
  std::vector<ProductPoint> points;
  double lambda = 0.0;
  double r_max = 0.0;
};

/// Recentered distances d(Xᵢ, 𝐨) − log(1/λ) + log log(1/λ), nondecreasing.
struct DelayVector {
  std::vector<double> delays;
};

/// log(1/λ) − log log(1/λ), the distance that maps to delay 0.
double delay_shift(double lambda);

/// Radius that covers every delay up to s_max, plus `margin`.
double delay_window_radius(double lambda, double s_max, double margin = 2.0);

NucleiSet sample_nuclei(double lambda, double r_max, RngStream& rng);

/// Index of the nearest nucleus in L¹ distance; ties go to the lowest index.
std::size_t voronoi_assign(const ProductPoint& z, const NucleiSet& nuclei);

/// Requires λ < 1/e.
DelayVector delays(const NucleiSet& nuclei);

/// Limit intensity of the delays, π² eˢ.
double limit_delay_intensity(double s);
/// ∫ₐᵇ π² eˢ ds.
double limit_delay_mass(double a, double b);
/// Finite-λ mean count of delays in [a, b]: λ (φ(b + shift) − φ(a + shift)).
double exact_delay_mass(double lambda, double a, double b);

struct DelayBin {
  double lo = 0.0, hi = 0.0;
  double expected = 0.0;
  double observed_mean = 0.0;
  double z_score = 0.0;
  /// Comparison against the finite-λ mean instead of the limit.
  double expected_exact = 0.0;
  double z_score_exact = 0.0;
};

struct DelayConvergenceReport {
  double lambda = 0.0;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  double r_max = 0.0;
  std::vector<DelayBin> bins;
  stats::KsResult first_delay_ks;        ///< vs exp(−π² eˢ) tail
  stats::KsResult first_delay_ks_exact;  ///< vs exact finite-λ law
  double void_probability_observed = 0.0;  ///< P(D₁ > 0)
  double void_probability_limit = 0.0;     ///< exp(−π²)
  double fraction_bins_within_3 = 0.0;
  double fraction_bins_within_3_exact = 0.0;
  bool passed = false;        ///< against the limit intensity
  bool passed_exact = false;  ///< against the finite-λ intensity

  nlohmann::json to_json() const;
};

/// Per-bin counts and a first-delay KS test over independent replicas.
/// `edges` are the bin boundaries (at least two, increasing).
DelayConvergenceReport delay_convergence_test(double lambda, std::uint64_t replicas,
                                              const std::vector<double>& edges, std::uint64_t seed,
                                              unsigned threads = 1);

struct EscapeStat {
  double angle_first = 0.0;
  double angle_second = 0.0;
  /// |ρ₁ − ρ₂| / (ρ₁ + ρ₂) with ρₖ the factor distances to the base point.
  double imbalance = 0.0;
};

std::vector<EscapeStat> boundary_escape_stat(const NucleiSet& nuclei, std::size_t k);

}  // namespace ipvt
