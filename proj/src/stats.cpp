#include "ipvt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ipvt::stats {

double kolmogorov_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    // P(K <= x) = sqrt(2 pi)/x * sum exp(-(2k-1)^2 pi^2 / (8 x^2))
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= 8; ++k) {
      const double m = 2.0 * k - 1.0;
      cdf += std::exp(-m * m * pi2 / (8.0 * x * x));
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / x;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sf = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sf += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sf, 0.0, 1.0);
}

namespace {

double corrected_p(double d, double effective_n) {
  const double root = std::sqrt(effective_n);
  return kolmogorov_sf((root + 0.12 + 0.11 / root) * d);
}

}  // namespace

KsResult ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  if (sorted.size() < 20) throw std::invalid_argument("ks_statistic: need at least 20 samples");
  if (!std::is_sorted(sorted.begin(), sorted.end()))
    throw std::invalid_argument("ks_statistic: samples must be sorted");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, corrected_p(d, n), sorted.size()};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 20 || b.size() < 20) throw std::invalid_argument("ks_two_sample: need at least 20 samples each");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, corrected_p(d, na * nb / (na + nb)), a.size() + b.size()};
}

double ks_critical_1pct(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

Estimate mean_estimate(std::span<const double> values) {
  Estimate e;
  e.n = values.size();
  if (values.empty()) return e;
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(e.n);
  if (e.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - e.mean) * (v - e.mean);
    e.std_error = std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
  }
  return e;
}

Estimate proportion(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("proportion: zero trials");
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials};
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> weights) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("linear_fit: need >= 3 paired points");
  if (!weights.empty() && weights.size() != x.size()) throw std::invalid_argument("linear_fit: weight size mismatch");
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w(i);
    sx += w(i) * x[i];
    sy += w(i) * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w(i) * (x[i] - mx) * (x[i] - mx);
    sxy += w(i) * (x[i] - mx) * (y[i] - my);
    syy += w(i) * (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += w(i) * r * r;
  }
  fit.r_squared = syy > 0 ? 1.0 - rss / syy : 1.0;
  const double dof = static_cast<double>(x.size()) - 2.0;
  // With inverse-variance weights the scale is known; otherwise use residuals.
  const double scale = weights.empty() ? rss / dof : std::max(rss / dof, 1.0);
  fit.slope_std_error = std::sqrt(scale / sxx);
  return fit;
}

}  // namespace ipvt::stats
