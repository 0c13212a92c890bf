#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ipvt::stats {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Survival function of the Kolmogorov distribution, P(K > x).
double kolmogorov_sf(double x);

/// One-sample Kolmogorov–Smirnov test. `sorted` must be nondecreasing and
/// hold at least 20 values. The p-value uses the asymptotic Kolmogorov law
/// at the Stephens-corrected argument (sqrt(n) + 0.12 + 0.11/sqrt(n))·D.
KsResult ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// Two-sample test; inputs need not be sorted.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Asymptotic 1% critical value 1.63/sqrt(n).
double ks_critical_1pct(std::size_t n);

/// Mean with its standard error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
};

Estimate mean_estimate(std::span<const double> values);
/// Binomial proportion with its standard error.
Estimate proportion(std::uint64_t successes, std::uint64_t trials);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
  double r_squared = 0.0;
};

/// Weighted least squares of y on x; weights default to 1.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y,
                     std::span<const double> weights = {});

}  // namespace ipvt::stats
