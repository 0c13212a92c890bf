#include "ipvt/finite_intensity.hpp"

#include "ipvt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ipvt {

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !(lambda < std::exp(-1.0)))
    throw std::invalid_argument("delays: lambda must lie in (0, 1/e)");
}

}  // namespace

double delay_shift(double lambda) {
  check_lambda(lambda);
  const double l = std::log(1.0 / lambda);
  return l - std::log(l);
}

double delay_window_radius(double lambda, double s_max, double margin) {
  return delay_shift(lambda) + s_max + margin;
}

NucleiSet sample_nuclei(double lambda, double r_max, RngStream& rng) {
  return {sample_ppp_ball(lambda, r_max, rng), lambda, r_max};
}

std::size_t voronoi_assign(const ProductPoint& z, const NucleiSet& nuclei) {
  if (nuclei.points.empty()) throw std::invalid_argument("voronoi_assign: empty nuclei");
  std::size_t best = 0;
  double best_d = dist_l1(z, nuclei.points[0]);
  for (std::size_t i = 1; i < nuclei.points.size(); ++i) {
    const double d = dist_l1(z, nuclei.points[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

DelayVector delays(const NucleiSet& nuclei) {
  const double shift = delay_shift(nuclei.lambda);
  const ProductPoint o = ProductPoint::origin(Model::disk);
  DelayVector out;
  out.delays.reserve(nuclei.points.size());
  for (const auto& x : nuclei.points) out.delays.push_back(dist_l1(x, o) - shift);
  // Sampled radii are sorted; recomputed distances may differ in the last bits.
  std::sort(out.delays.begin(), out.delays.end());
  return out;
}

double limit_delay_intensity(double s) { return kPi2 * std::exp(s); }

double limit_delay_mass(double a, double b) { return kPi2 * (std::exp(b) - std::exp(a)); }

double exact_delay_mass(double lambda, double a, double b) {
  const double shift = delay_shift(lambda);
  const double lo = std::max(0.0, a + shift);
  const double hi = std::max(0.0, b + shift);
  return lambda * (ball_volume(hi) - ball_volume(lo));
}

DelayConvergenceReport delay_convergence_test(double lambda, std::uint64_t replicas,
                                              const std::vector<double>& edges, std::uint64_t seed,
                                              unsigned threads) {
  if (replicas < 100) throw std::invalid_argument("delay_convergence_test: need at least 100 replicas");
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("delay_convergence_test: bin edges must be strictly increasing");
  const double s_max = edges.back();
  const double r_max = delay_window_radius(lambda, s_max);

  const std::size_t nbins = edges.size() - 1;
  // Each replica owns its slot; the merge below runs in index order.
  std::vector<std::vector<std::uint32_t>> per_replica(replicas);
  std::vector<double> first(replicas);
  parallel_for(replicas, threads, [&](std::uint64_t r) {
    RngStream rng(seed, r);
    const DelayVector d = delays(sample_nuclei(lambda, r_max, rng));
    // The window radius exceeds s_max + shift, so the first delay always exists in practice.
    first[r] = d.delays.empty() ? r_max - delay_shift(lambda) : d.delays.front();
    auto& c = per_replica[r];
    c.assign(nbins, 0);
    for (double s : d.delays) {
      if (s < edges.front() || s >= edges.back()) continue;
      const auto it = std::upper_bound(edges.begin(), edges.end(), s);
      ++c[static_cast<std::size_t>(it - edges.begin()) - 1];
    }
  });
  std::vector<std::uint64_t> counts(nbins, 0);
  std::uint64_t void_count = 0;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    for (std::size_t b = 0; b < nbins; ++b) counts[b] += per_replica[r][b];
    if (first[r] > 0.0) ++void_count;
  }

  DelayConvergenceReport rep;
  rep.lambda = lambda;
  rep.replicas = replicas;
  rep.seed = seed;
  rep.r_max = r_max;
  const double n = static_cast<double>(replicas);
  std::size_t within = 0, within_exact = 0;
  for (std::size_t b = 0; b < nbins; ++b) {
    DelayBin bin;
    bin.lo = edges[b];
    bin.hi = edges[b + 1];
    bin.expected = limit_delay_mass(bin.lo, bin.hi);
    bin.expected_exact = exact_delay_mass(lambda, bin.lo, bin.hi);
    bin.observed_mean = static_cast<double>(counts[b]) / n;
    // Poisson counts: variance of the replica mean is expected / n.
    bin.z_score = (bin.observed_mean - bin.expected) / std::sqrt(bin.expected / n);
    bin.z_score_exact = (bin.observed_mean - bin.expected_exact) / std::sqrt(bin.expected_exact / n);
    within += std::abs(bin.z_score) <= 3.0;
    within_exact += std::abs(bin.z_score_exact) <= 3.0;
    rep.bins.push_back(bin);
  }
  rep.fraction_bins_within_3 = static_cast<double>(within) / static_cast<double>(nbins);
  rep.fraction_bins_within_3_exact = static_cast<double>(within_exact) / static_cast<double>(nbins);

  std::sort(first.begin(), first.end());
  rep.first_delay_ks = stats::ks_statistic(first, [](double s) { return 1.0 - std::exp(-kPi2 * std::exp(s)); });
  const double shift = delay_shift(lambda);
  rep.first_delay_ks_exact = stats::ks_statistic(first, [&](double s) {
    return 1.0 - std::exp(-lambda * ball_volume(std::max(0.0, s + shift)));
  });
  rep.void_probability_observed = static_cast<double>(void_count) / n;
  rep.void_probability_limit = std::exp(-kPi2);
  rep.passed = rep.fraction_bins_within_3 >= 0.95 && rep.first_delay_ks.p_value > 0.01;
  rep.passed_exact = rep.fraction_bins_within_3_exact >= 0.95 && rep.first_delay_ks_exact.p_value > 0.01;
  return rep;
}

nlohmann::json DelayConvergenceReport::to_json() const {
  nlohmann::json bins_json = nlohmann::json::array();
  for (const auto& b : bins)
    bins_json.push_back({{"lo", b.lo},
                         {"hi", b.hi},
                         {"expected", b.expected},
                         {"observed_mean", b.observed_mean},
                         {"z_score", b.z_score},
                         {"expected_exact", b.expected_exact},
                         {"z_score_exact", b.z_score_exact}});
  return {{"lambda", lambda},
          {"replicas", replicas},
          {"seed", seed},
          {"r_max", r_max},
          {"bins", bins_json},
          {"first_delay_ks", {{"statistic", first_delay_ks.statistic}, {"p_value", first_delay_ks.p_value}, {"n", first_delay_ks.n}}},
          {"first_delay_ks_exact",
           {{"statistic", first_delay_ks_exact.statistic}, {"p_value", first_delay_ks_exact.p_value}, {"n", first_delay_ks_exact.n}}},
          {"void_probability_observed", void_probability_observed},
          {"void_probability_limit", void_probability_limit},
          {"fraction_bins_within_3", fraction_bins_within_3},
          {"fraction_bins_within_3_exact", fraction_bins_within_3_exact},
          {"passed", passed},
          {"passed_exact", passed_exact}};
}

std::vector<EscapeStat> boundary_escape_stat(const NucleiSet& nuclei, std::size_t k) {
  if (k > nuclei.points.size()) throw std::out_of_range("boundary_escape_stat: k exceeds nuclei count");
  std::vector<EscapeStat> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& x = nuclei.points[i];
    const double r1 = hyp::dist_from_origin(x.disk_first());
    const double r2 = hyp::dist_from_origin(x.disk_second());
    EscapeStat s;
    s.angle_first = std::arg(x.first());
    s.angle_second = std::arg(x.second());
    s.imbalance = r1 + r2 > 0.0 ? std::abs(r1 - r2) / (r1 + r2) : 0.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace ipvt
