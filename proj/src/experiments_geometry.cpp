// volume, corona-portrait and isometry-check experiments.

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "ipvt/corona.hpp"
#include "ipvt/experiment.hpp"
#include "ipvt/parallel.hpp"
#include "ipvt/stats.hpp"
#include "ipvt/svg.hpp"

namespace ipvt::experiments {

namespace {

constexpr double kPi = std::numbers::pi;

// Stream-id namespaces keep the sub-experiments of one run independent.
constexpr std::uint64_t kStreamBlock = std::uint64_t{1} << 40;

double relative_error(double value, double reference) { return std::abs(value / reference - 1.0); }

}  // namespace

void volume(const ExperimentConfig&, Parameters& p, TestReport& report, Artifacts& out) {
  const auto radii = p.reals("radii", {0.1, 0.5, 1.0, 2.0, 5.0, 10.0});
  const double tolerance = p.real("tolerance", 1e-8, 0.0, 1.0, true);
  const double r_max = p.real("r_max", 10.0, 0.0, 700.0, true);
  const auto points = p.count("curve_points", 200, 2, 100000);
  for (double r : radii)
    if (!(r > 0.0 && r <= 700.0)) p.reject("radii", fmt::format("{} outside (0, 700]", r));
  p.finish();

  double worst = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (double r : radii) {
    const double closed = ball_volume(r), quad = ball_volume_quadrature(r);
    worst = std::max(worst, relative_error(quad, closed));
    rows.push_back({{"r", r}, {"closed_form", closed}, {"quadrature", quad}, {"relative_error", relative_error(quad, closed)}});
  }
  report.statistics["test_radii"] = rows;
  report.statistics["max_relative_error"] = worst;
  report.check("quadrature matches closed form", worst < tolerance, fmt::format("max relative error {:.3e} < {:g}", worst, tolerance));

  // φ(r)/(π² r eʳ) = 1 + e^{−2r} − (1 − e^{−2r})/r exactly.
  const double r_big = 30.0;
  const double ratio = ball_volume(r_big) / (kPi * kPi * r_big * std::exp(r_big));
  const double expected_ratio = 1.0 + std::exp(-2.0 * r_big) - (1.0 - std::exp(-2.0 * r_big)) / r_big;
  report.statistics["growth_ratio_r30"] = ratio;
  report.diagnose("growth ratio at r = 30 equals 1 - 1/r + O(exp(-2r))", relative_error(ratio, expected_ratio) < 1e-12,
                  fmt::format("ratio {:.12f}", ratio));

  std::vector<double> grid_r, grid_v, grid_q;
  bool increasing = true;
  auto csv = out.open(".csv");
  csv << "r,closed_form,quadrature,relative_error\n";
  for (std::uint64_t k = 1; k <= points; ++k) {
    const double r = r_max * static_cast<double>(k) / static_cast<double>(points);
    const double closed = ball_volume(r), quad = ball_volume_quadrature(r);
    if (!grid_v.empty() && !(closed > grid_v.back())) increasing = false;
    grid_r.push_back(r);
    grid_v.push_back(closed);
    grid_q.push_back(quad);
    csv << csv_row({r, closed, quad, relative_error(quad, closed)});
  }
  report.check("volume strictly increasing on the curve grid", increasing);

  std::vector<double> test_v;
  for (double r : radii) test_v.push_back(ball_volume(r));
  SvgPlot plot("L1 ball volume in H2 x H2", {0.0, r_max, false, "r"},
               {std::max(1e-6, grid_v.front() * 0.5), grid_v.back() * 2.0, true, "volume"});
  plot.polyline(grid_r, grid_v, "#1f77b4");
  plot.scatter(radii, test_v, {}, "#d62728", 0.9);
  plot.legend("closed form", "#1f77b4");
  plot.legend("quadrature checks", "#d62728");
  plot.write(out.path(".svg"));
  out.record(".svg");
}

void corona_portrait(const ExperimentConfig& cfg, Parameters& p, TestReport& report, Artifacts& out) {
  const auto n = p.count("points", 1000, 20, 10000000);
  const double radius_scale = p.real("radius_scale", 0.01, 0.0, 1e6);
  p.finish();

  RngStream rng(cfg.seed, 0);
  CoronaSample sample = sample_corona(static_cast<double>(n), rng);
  while (sample.points.size() < n) sample = extend_corona(sample, 2.0 * sample.r_cutoff, rng);
  // The first n atoms of the process, exact regardless of the cutoff used.
  sample.points.erase(sample.points.begin() + static_cast<std::ptrdiff_t>(n), sample.points.end());
  sample.r_cutoff = sample.points.back().r();

  std::vector<double> theta, phi, gaps;
  double previous = 0.0;
  for (const auto& c : sample.points) {
    theta.push_back(c.theta_angle());
    phi.push_back(c.phi_angle());
    gaps.push_back(c.r() - previous);
    previous = c.r();
  }
  std::vector<double> plot_theta = theta, plot_phi = phi, radii;
  for (const auto& c : sample.points) radii.push_back(1.0 + radius_scale * c.r());
  std::sort(theta.begin(), theta.end());
  std::sort(phi.begin(), phi.end());
  std::sort(gaps.begin(), gaps.end());
  auto uniform_cdf = [](double x) { return (x + kPi) / (2.0 * kPi); };
  const auto ks_theta = stats::ks_statistic(theta, uniform_cdf);
  const auto ks_phi = stats::ks_statistic(phi, uniform_cdf);
  const auto ks_gaps = stats::ks_statistic(gaps, [](double x) { return 1.0 - std::exp(-x); });
  report.statistics["points"] = n;
  report.statistics["largest_radius"] = sample.r_cutoff;
  report.statistics["first_radius"] = sample.points.front().r();
  report.statistics["ks_theta_uniform"] = ks_json(ks_theta);
  report.statistics["ks_phi_uniform"] = ks_json(ks_phi);
  report.statistics["ks_radius_gaps_exponential"] = ks_json(ks_gaps);
  report.check("theta uniform (KS p > 0.01)", ks_theta.p_value > 0.01, fmt::format("p = {:.4f}", ks_theta.p_value));
  report.check("phi uniform (KS p > 0.01)", ks_phi.p_value > 0.01, fmt::format("p = {:.4f}", ks_phi.p_value));
  report.check("radius gaps Exp(1) (KS p > 0.01)", ks_gaps.p_value > 0.01, fmt::format("p = {:.4f}", ks_gaps.p_value));

  auto csv = out.open(".csv");
  write_corona_csv(csv, sample);
  SvgPlot plot(fmt::format("First {} corona points (disk size grows linearly with r)", n), {-kPi, kPi, false, "theta"},
               {-kPi, kPi, false, "phi"}, 640, 640);
  plot.scatter(plot_theta, plot_phi, radii, "#1f77b4", 0.35);
  plot.write(out.path(".svg"));
  out.record(".svg");
}

void isometry_check(const ExperimentConfig& cfg, Parameters& p, TestReport& report, Artifacts& out) {
  const auto triples = p.count("triples", 10000, 1, 100000000);
  const auto replicas = p.count("replicas", 10000, 2, 100000000);
  const double tolerance = p.real("tolerance", 1e-10, 0.0, 1.0, true);
  const double box_r = p.real("box_r", 5.0, 0.0, 1e4, true);
  const double move = p.real("max_factor_distance", 1.5, 0.0, 10.0);
  p.finish();

  // Equivariance sep(g·z, g·p) = sep(z, p) on random triples.
  std::vector<double> residual(triples);
  parallel_for(triples, cfg.threads, [&](std::uint64_t i) {
    RngStream rng(cfg.seed, i);
    const ProductIsometry g = random_isometry(rng, 3.0);
    auto point = [&] { return hyp::DiskPoint(std::polar(0.95 * std::sqrt(rng.uniform()), rng.angle())); };
    const ProductPoint z(point(), point());
    const CoronaPoint c(hyp::BoundaryAngle(rng.angle()), hyp::BoundaryAngle(rng.angle()), rng.exponential());
    residual[i] = relative_error(separation(isometry_apply(g, z), corona_isometry_apply(g, c)), separation(z, c));
  });
  const double worst = *std::max_element(residual.begin(), residual.end());
  report.statistics["equivariance"] = {{"triples", triples}, {"max_relative_residual", worst}};
  report.check("separation equivariance", worst < tolerance, fmt::format("max residual {:.3e} < {:g}", worst, tolerance));

  // Box counts of the pushed-forward process against fresh samples. Pushed
  // radii satisfy r' >= r·exp(−d₁ − d₂), so radii up to box_r·exp(d₁ + d₂) suffice.
  RngStream setup(cfg.seed, kStreamBlock);
  const ProductIsometry g = random_isometry(setup, move);
  const ProductIsometry g_inv = g.inverse();
  const ProductPoint pre = isometry_apply(g_inv, ProductPoint::origin(Model::disk));
  const double cutoff = box_r * std::exp(dist_l1(pre, ProductPoint::origin(Model::disk))) * (1.0 + 1e-9);
  auto in_box = [&](const CoronaPoint& c) {
    return c.theta_angle() >= 0.0 && c.theta_angle() <= 1.0 && c.phi_angle() >= 0.0 && c.phi_angle() <= 1.0 &&
           c.r() <= box_r;
  };
  std::vector<double> pushed(replicas), fresh(replicas);
  parallel_for(replicas, cfg.threads, [&](std::uint64_t i) {
    RngStream a(cfg.seed, 2 * kStreamBlock + i), b(cfg.seed, 3 * kStreamBlock + i);
    std::uint64_t na = 0, nb = 0;
    for (const auto& c : sample_corona(cutoff, a).points) na += in_box(corona_isometry_apply(g, c));
    for (const auto& c : sample_corona(box_r, b).points) nb += in_box(c);
    pushed[i] = static_cast<double>(na);
    fresh[i] = static_cast<double>(nb);
  });
  const auto ep = stats::mean_estimate(pushed), ef = stats::mean_estimate(fresh);
  const double expected = box_r / (4.0 * kPi * kPi);
  const double z = (ep.mean - ef.mean) / std::hypot(ep.std_error, ef.std_error);
  report.statistics["measure_invariance"] = {{"replicas", replicas},
                                             {"sampling_cutoff", cutoff},
                                             {"expected_count", expected},
                                             {"pushforward_count", estimate_json(ep)},
                                             {"fresh_count", estimate_json(ef)},
                                             {"z_score", z}};
  report.check("pushforward box count matches fresh count (|z| <= 3)", std::abs(z) <= 3.0, fmt::format("z = {:.3f}", z));
  report.diagnose("pushforward box count matches exact mean (|z| <= 3)",
                  std::abs(ep.mean - expected) <= 3.0 * ep.std_error,
                  fmt::format("{:.5f} vs {:.5f}", ep.mean, expected));

  auto csv = out.open(".csv");
  csv << "replica,pushforward_count,fresh_count\n";
  for (std::uint64_t i = 0; i < replicas; ++i) csv << csv_row({static_cast<double>(i), pushed[i], fresh[i]});

  // Running means of both counts.
  std::vector<double> xs, ya, yb;
  double sa = 0.0, sb = 0.0;
  for (std::uint64_t i = 0; i < replicas; ++i) {
    sa += pushed[i];
    sb += fresh[i];
    const double k = static_cast<double>(i + 1);
    if (i % std::max<std::uint64_t>(1, replicas / 400) == 0 || i + 1 == replicas) {
      xs.push_back(k);
      ya.push_back(sa / k);
      yb.push_back(sb / k);
    }
  }
  SvgPlot plot("Box count: pushed-forward vs fresh corona", {1.0, static_cast<double>(replicas), true, "replicas"},
               {0.0, 3.0 * expected, false, "running mean count"});
  plot.polyline(xs, ya, "#1f77b4");
  plot.polyline(xs, yb, "#ff7f0e");
  plot.hline(expected, "#000");
  plot.legend("pushed forward", "#1f77b4");
  plot.legend("fresh", "#ff7f0e");
  plot.write(out.path(".svg"));
  out.record(".svg");
}

}  // namespace ipvt::experiments
