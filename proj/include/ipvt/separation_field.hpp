#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "ipvt/corona.hpp"
#include "ipvt/stats.hpp"

namespace ipvt {

/// The point tanh(t/2)·(1, 1) of the disk model, travelling towards (1, 1).
class TravelerState {
 public:
  static TravelerState at_time(double t);
  /// ε in (0, 1]; the traveler sits at ρ = 1 − ε.
  static TravelerState at_epsilon(double epsilon);

  double t() const { return t_; }
  double epsilon() const { return epsilon_; }
  double rho() const { return rho_; }
  ProductPoint position() const;

 private:
  TravelerState(double t, double epsilon, double rho) : t_(t), epsilon_(epsilon), rho_(rho) {}
  double t_, epsilon_, rho_;
};

/// Coefficients of r·[f₁ + 2f₂(2 − cos θ − cos φ) + 4f₃(1 − cos θ)(1 − cos φ)].
double f1(double epsilon);
double f2(double epsilon);
/// (1 − ε)²/(ε²(2 − ε)²), the value forced by the kernel product.
double f3(double epsilon);
/// (1 − ε)/(2ε²(2 − ε)²); agrees with f3 only at ε = 1/2.
double f3_uncorrected(double epsilon);

enum class CrossCoefficient { corrected, uncorrected };

/// Separation of the traveler to (θ, φ, r) via the cosine expansion.
double separation_expansion(const TravelerState& state, double theta, double phi, double r,
                            CrossCoefficient coefficient = CrossCoefficient::corrected);

/// One atom of a separation field: rescaled angles and the separation value.
struct SeparationSample {
  double theta_hat = 0.0;
  double phi_hat = 0.0;
  double y = 0.0;
};

enum class FieldSampler {
  /// Corona radii up to y_max·exp(d(z, 𝐨)), mapped and filtered. Cost grows like ε⁻².
  truncated,
  /// Corona points under a piecewise-constant kernel bound on geometric angle
  /// bins around arg z, kept when sep <= y_max. Exact; cost independent of ε.
  envelope,
};

/// Field seen from z = (1 − εη, 1 − εξ): atoms (θ/ε, φ/ε, sep(z, ·)) with
/// sep <= y_max, sorted by y. Requires Re η > ε|η|²/2 (likewise ξ) so z is interior.
std::vector<SeparationSample> rescaled_field_sample(double epsilon, std::complex<double> eta,
                                                    std::complex<double> xi, double y_max, RngStream& rng,
                                                    FieldSampler sampler = FieldSampler::envelope);

/// Traveler form, η = ξ = 1.
std::vector<SeparationSample> rescaled_field_sample(const TravelerState& state, double y_max, RngStream& rng,
                                                    FieldSampler sampler = FieldSampler::envelope);

/// Limit process: y a homogeneous process of the given rate on [0, y_max],
/// θ̂ ~ Cauchy(−Im η, Re η), φ̂ ~ Cauchy(−Im ξ, Re ξ), all independent.
std::vector<SeparationSample> limit_field_sample(std::complex<double> eta, std::complex<double> xi, double y_max,
                                                 RngStream& rng, double rate = 1.0);

/// 1/2 + 2/π².
double tiebreak_constant();

enum class TiebreakMethod { direct_z, corona_limit };

struct TiebreakEstimate {
  TiebreakMethod method = TiebreakMethod::direct_z;
  std::uint64_t hits = 0;
  std::uint64_t n = 0;
  stats::Estimate estimate;
  double ci_lo = 0.0, ci_hi = 0.0;  ///< 95% normal interval
};

/// direct_z: P(U·B₁/B₂ <= 1), B = (1 − cos V)/2 with V uniform.
/// corona_limit: P(R₁(1 − cos Φ₁) <= R₂(1 − cos Θ₂)), R₁ = E₁, R₂ = E₁ + E₂.
/// Chunk c of 2²⁰ draws uses stream (seed, stream_offset + c).
TiebreakEstimate tiebreak_estimate(TiebreakMethod method, std::uint64_t n, std::uint64_t seed,
                                   unsigned threads = 1, std::uint64_t stream_offset = 0);

struct RayProbeStep {
  double t = 0.0;
  std::size_t winner = 0;
  bool certified = false;
};

struct EndProbeVerdict {
  bool exits = false;
  /// First t at which a certified winner other than the zero cell appears.
  double exit_t = 0.0;
  std::vector<RayProbeStep> steps;
};

/// Certified cell assignment along tanh(t/2)·(e^{iτ₁}, e^{iτ₂}) for each t,
/// optionally stopping at the first certified exit.
EndProbeVerdict probe_ray(const CoronaSample& sample, double tau1, double tau2, const std::vector<double>& t_grid,
                          bool stop_at_exit = false);

/// probe_ray for a direction off the end of the zero cell: both circular
/// distances |τ₁ − Θ₁| and |τ₂ − Φ₁| must exceed delta.
EndProbeVerdict end_of_cell_probe(const CoronaSample& sample, double tau1, double tau2,
                                  const std::vector<double>& t_grid, double delta, bool stop_at_exit = false);

}  // namespace ipvt
