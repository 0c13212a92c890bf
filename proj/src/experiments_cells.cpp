// coverage, mushroom, end-probe and nml-probe experiments.

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "ipvt/corona.hpp"
#include "ipvt/coverage.hpp"
#include "ipvt/experiment.hpp"
#include "ipvt/parallel.hpp"
#include "ipvt/separation_field.hpp"
#include "ipvt/svg.hpp"

namespace ipvt::experiments {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kStreamBlock = std::uint64_t{1} << 40;

std::vector<double> uniform_grid(double step, double max) {
  std::vector<double> g;
  for (std::size_t k = 1; step * static_cast<double>(k) <= max * (1.0 + 1e-12); ++k) g.push_back(step * static_cast<double>(k));
  return g;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

void coverage(const ExperimentConfig& cfg, Parameters& p, TestReport& report, Artifacts& out) {
  const double half_width = p.real("half_width", 10.0, 0.0, 1e6, true);
  const auto resolution = p.count("resolution", 512, 2, 8192);
  const auto replicas = p.count("replicas", 50, 1, 1000000);
  const auto events = p.count("events", 100000, 1, 100000000);
  const bool conditional = p.flag("conditional", true);
  const double r1_fixed = p.real("r1", 1.0, 0.0, 1e6, true);
  const double target = p.real("target", 0.999, 0.0, 1.0, true);
  const double replica_fraction = p.real("replica_fraction", 0.9, 0.0, 1.0);
  const auto ball_samples = p.count("ball_samples", 100000, 10000, 100000000);
  p.finish();

  struct Replica {
    double r1 = 0.0;
    std::size_t to_target = 0;
    bool monotone = true, dominated = true;
    double final_cross = 0.0, final_disk = 0.0;
    CoverageCurve cross, disk;
    std::vector<double> t;
  };
  std::vector<Replica> runs(replicas);
  parallel_for(replicas, cfg.threads, [&](std::uint64_t i) {
    RngStream rng(cfg.seed, i);
    Replica& run = runs[i];
    run.r1 = conditional ? r1_fixed : rng.exponential();
    const auto ev = sample_deposition(events, rng);
    CoverageGrid gc(half_width, resolution), gd(half_width, resolution);
    run.cross = coverage_run(gc, run.r1, ev, CoverageMode::crosses);
    run.disk = coverage_run(gd, run.r1, ev, CoverageMode::inscribed_disks);
    for (std::size_t k = 0; k < ev.size(); ++k) {
      if (k > 0 && run.cross.covered[k] < run.cross.covered[k - 1]) run.monotone = false;
      if (run.disk.covered[k] > run.cross.covered[k]) run.dominated = false;
    }
    // Cell-level inclusion: every disk-covered cell is cross-covered.
    for (std::size_t r = 0; r < resolution && run.dominated; ++r)
      for (std::size_t c = 0; c < resolution; ++c)
        if (gd.covered(r, c) && !gc.covered(r, c)) {
          run.dominated = false;
          break;
        }
    run.to_target = run.cross.events_to_reach(target);
    run.final_cross = run.cross.fraction(ev.size() - 1);
    run.final_disk = run.disk.fraction(ev.size() - 1);
    if (i == 0)
      for (const auto& e : ev) run.t.push_back(e.t);
    else {
      run.cross.covered.clear();
      run.disk.covered.clear();
    }
  });

  std::size_t reached = 0;
  bool monotone = true, dominated = true;
  std::vector<double> needed;
  nlohmann::json per_replica = nlohmann::json::array();
  for (const auto& r : runs) {
    monotone &= r.monotone;
    dominated &= r.dominated;
    if (r.to_target > 0) {
      ++reached;
      needed.push_back(static_cast<double>(r.to_target));
    }
    per_replica.push_back({{"r1", r.r1},
                           {"events_to_target", r.to_target},
                           {"final_cross_fraction", r.final_cross},
                           {"final_disk_fraction", r.final_disk}});
  }
  const double reached_fraction = static_cast<double>(reached) / static_cast<double>(replicas);
  report.statistics["replicas"] = per_replica;
  report.statistics["fraction_reaching_target"] = reached_fraction;
  report.statistics["median_events_to_target"] = median(needed);
  report.check("cross coverage monotone", monotone);
  report.check("inscribed-disk coverage <= cross coverage at every step", dominated);
  report.check(fmt::format("cross coverage exceeds {:g} within {} events in >= {:g} of replicas", target, events,
                           replica_fraction),
               reached_fraction >= replica_fraction, fmt::format("{} of {} replicas", reached, replicas));

  const BallModelReport ball = ball_model_intensity_check(conditional ? r1_fixed : 1.0, ball_samples, cfg.seed);
  report.statistics["ball_model"] = ball.to_json();
  report.check("ball-model radius profile exponent -5 +- 0.2", std::abs(ball.fitted_exponent + 5.0) <= 0.2,
               fmt::format("{:.3f} +- {:.3f}", ball.fitted_exponent, ball.exponent_std_error));
  report.check("ball-model radii satisfy rho^4 <= 4(1+x^2)(1+y^2)", ball.constraint_violations == 0,
               fmt::format("{} violations", ball.constraint_violations));
  report.diagnose("ball-model radii satisfy rho^4 <= (1+x^2)(1+y^2)", ball.loose_constraint_violations == 0,
                  fmt::format("{} of {} samples exceed it", ball.loose_constraint_violations, ball.samples));

  // Replica 0 curve at log-spaced event indices.
  const Replica& first = runs.front();
  std::vector<std::size_t> rows;
  for (std::size_t k = 1; k <= events; k = std::max(k + 1, static_cast<std::size_t>(std::ceil(k * 1.02)))) rows.push_back(k);
  if (rows.back() != events) rows.push_back(events);
  auto csv = out.open(".csv");
  csv << "event_index,t,coverage_fraction,disk_coverage_fraction\n";
  std::vector<double> xs, yc, yd;
  for (std::size_t k : rows) {
    csv << csv_row({static_cast<double>(k), first.t[k - 1], first.cross.fraction(k - 1), first.disk.fraction(k - 1)});
    xs.push_back(static_cast<double>(k));
    yc.push_back(first.cross.fraction(k - 1));
    yd.push_back(first.disk.fraction(k - 1));
  }
  SvgPlot plot(fmt::format("Coverage of [-{0:g}, {0:g}]^2 (replica 0, r1 = {1:.3g})", half_width, first.r1),
               {1.0, std::max(10.0, static_cast<double>(events)), true, "events"}, {0.0, 1.0, false, "covered fraction"});
  plot.polyline(xs, yc, "#1f77b4");
  plot.polyline(xs, yd, "#ff7f0e");
  plot.hline(target, "#000");
  plot.legend("hyperbolic crosses", "#1f77b4");
  plot.legend("inscribed disks", "#ff7f0e");
  plot.write(out.path(".svg"));
  out.record(".svg");
}

void mushroom(const ExperimentConfig& cfg, Parameters& p, TestReport& report, Artifacts& out) {
  const auto configs = p.count("configs", 1000, 1, 10000000);
  const double half_width = p.real("half_width", 10.0, 0.0, 1e6, true);
  const auto resolution = p.count("resolution", 201, 2, 8192);
  const double height = p.real("probe_height", 1e-6, 0.0, 1.0, true);
  p.finish();

  struct Config {
    double theta, phi, r_i, r1, y;
    MushroomReport rep;
  };
  std::vector<Config> runs(configs);
  parallel_for(configs, cfg.threads, [&](std::uint64_t i) {
    RngStream rng(cfg.seed, i);
    Config& c = runs[i];
    c.r1 = rng.exponential();
    c.r_i = c.r1 + rng.exponential();
    c.theta = rng.standard_cauchy();
    c.phi = rng.standard_cauchy();
    c.y = rng.standard_cauchy();
    c.rep = mushroom_region(c.theta, c.phi, c.r_i, c.r1, c.y, half_width, resolution, height);
    if (i != 0) c.rep.mask.clear();
  });
  std::size_t outside = 0, kernel_outside = 0, kernel_members = 0, all_edges = 0;
  for (const auto& c : runs) {
    outside += c.rep.line_members_outside;
    kernel_outside += c.rep.kernel_line_members_outside;
    kernel_members += c.rep.kernel_line_members;
    all_edges += c.rep.touches_left && c.rep.touches_right && c.rep.touches_bottom && c.rep.touches_top;
  }
  report.statistics["configs"] = configs;
  report.statistics["closed_form_line_members_outside"] = outside;
  report.statistics["kernel_line_members"] = kernel_members;
  report.statistics["kernel_line_members_outside"] = kernel_outside;
  report.statistics["fraction_touching_all_edges"] = static_cast<double>(all_edges) / static_cast<double>(configs);
  report.check("closed form: no line membership outside one cell of Ste(theta_i)", outside == 0,
               fmt::format("{} cells", outside));
  report.check("kernel separations: no line membership outside one cell of Ste(theta_i)", kernel_outside == 0,
               fmt::format("{} cells over {} configurations", kernel_outside, configs));

  const Config& c = runs.front();
  const double step = 2.0 * half_width / static_cast<double>(resolution);
  auto center = [&](std::size_t i) { return -half_width + (static_cast<double>(i) + 0.5) * step; };
  auto csv = out.open(".csv");
  csv << "x1,x2,member\n";
  SvgPlot plot(fmt::format("Competitor region, theta_i = {:.3f}, y = {:.3f}", c.theta, c.y),
               {-half_width, half_width, false, "Re z1"}, {-half_width, half_width, false, "Re z2"}, 600, 600);
  for (std::size_t row = 0; row < resolution; ++row) {
    std::size_t run_start = resolution;
    for (std::size_t col = 0; col <= resolution; ++col) {
      const bool member = col < resolution && c.rep.mask[row * resolution + col];
      if (col < resolution) csv << csv_row({center(col), center(row), member ? 1.0 : 0.0});
      if (member && run_start == resolution) run_start = col;
      if (!member && run_start != resolution) {
        plot.rect(center(run_start) - 0.5 * step, center(row) - 0.5 * step, center(col) - 0.5 * step,
                  center(row) + 0.5 * step, "#9467bd", 0.8);
        run_start = resolution;
      }
    }
  }
  plot.hline(c.y, "#d62728");
  plot.vline(c.theta, "#2ca02c");
  plot.write(out.path(".svg"));
  out.record(".svg");
}

void end_probe(const ExperimentConfig& cfg, Parameters& p, TestReport& report, Artifacts& out) {
  const auto replicas = p.count("replicas", 100, 1, 1000000);
  const auto directions = p.count("directions", 100, 1, 1000000);
  const double r_cutoff = p.real("r_cutoff", 1000.0, 0.0, 1e7, true);
  const double t_max = p.real("t_max", 15.0, 0.0, 30.0, true);
  const double t_step = p.real("t_step", 0.05, 0.0, 30.0, true);
  const double delta = p.real("delta", 0.25, 0.0, kPi * 0.9, true);
  const double exit_fraction = p.real("exit_fraction", 0.95, 0.0, 1.0);
  const auto recheck = p.count("recheck_replicas", 10, 0, 1000000);
  p.finish();

  const std::vector<double> grid = uniform_grid(t_step, t_max);
  struct Direction {
    double tau1, tau2;
    EndProbeVerdict verdict;
  };
  struct Replica {
    std::vector<Direction> dirs;
    bool end_exits = false;
    std::size_t flips = 0;
  };
  std::vector<Replica> runs(replicas);
  parallel_for(replicas, cfg.threads, [&](std::uint64_t i) {
    RngStream rng(cfg.seed, i);
    CoronaSample sample = sample_corona(r_cutoff, rng);
    while (sample.points.size() < 2) sample = extend_corona(sample, 2.0 * sample.r_cutoff, rng);
    const double theta1 = sample.points.front().theta_angle(), phi1 = sample.points.front().phi_angle();
    Replica& run = runs[i];
    for (std::uint64_t d = 0; d < directions; ++d) {
      double a, b;
      do {
        a = rng.angle();
        b = rng.angle();
      } while (hyp::circular_distance(a, theta1) <= delta || hyp::circular_distance(b, phi1) <= delta);
      run.dirs.push_back({a, b, end_of_cell_probe(sample, a, b, grid, delta, true)});
    }
    run.end_exits = probe_ray(sample, theta1, phi1, grid).exits;
    if (i < recheck) {
      // A certified exit must survive a larger cutoff.
      const CoronaSample bigger = extend_corona(sample, 2.0 * sample.r_cutoff, rng);
      for (const auto& d : run.dirs) {
        if (!d.verdict.exits) continue;
        const auto again = probe_ray(bigger, d.tau1, d.tau2, {d.verdict.exit_t});
        const auto& before = d.verdict.steps.back();
        if (!again.steps.front().certified || again.steps.front().winner != before.winner) ++run.flips;
      }
    }
  });

  std::size_t exits = 0, total = 0, end_exits = 0, flips = 0;
  std::vector<double> exit_times;
  for (const auto& r : runs) {
    for (const auto& d : r.dirs) {
      ++total;
      if (d.verdict.exits) {
        ++exits;
        exit_times.push_back(d.verdict.exit_t);
      }
    }
    end_exits += r.end_exits;
    flips += r.flips;
  }
  const double fraction = static_cast<double>(exits) / static_cast<double>(total);
  report.statistics["directions_probed"] = total;
  report.statistics["exit_fraction"] = estimate_json(stats::proportion(exits, total));
  report.statistics["median_exit_t"] = median(exit_times);
  report.statistics["max_exit_t"] = exit_times.empty() ? 0.0 : *std::max_element(exit_times.begin(), exit_times.end());
  report.statistics["end_direction_exits"] = end_exits;
  report.statistics["certificate_flips_after_doubling"] = flips;
  report.check(fmt::format("off-end directions certified to exit by t = {:g} (>= {:g})", t_max, exit_fraction),
               fraction >= exit_fraction, fmt::format("{} of {} ({:.4f})", exits, total, fraction));
  report.check("direction (Theta1, Phi1) never exits", end_exits == 0, fmt::format("{} replicas", end_exits));
  report.check("doubling r_cutoff never flips a certified exit", flips == 0, fmt::format("{} flips", flips));

  auto csv = out.open(".csv");
  csv << "replica,direction,tau1,tau2,exits,exit_t\n";
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t d = 0; d < runs[i].dirs.size(); ++d) {
      const auto& x = runs[i].dirs[d];
      csv << csv_row({static_cast<double>(i), static_cast<double>(d), x.tau1, x.tau2, x.verdict.exits ? 1.0 : 0.0,
                      x.verdict.exit_t});
    }

  const double bin = 0.25;
  const std::size_t nbins = static_cast<std::size_t>(std::ceil(t_max / bin));
  std::vector<double> hist(nbins, 0.0);
  for (double t : exit_times) hist[std::min(nbins - 1, static_cast<std::size_t>(t / bin))] += 1.0;
  const double peak = std::max(1.0, *std::max_element(hist.begin(), hist.end()));
  SvgPlot plot("Certified exit times of off-end directions", {0.0, t_max, false, "t"}, {0.0, 1.1 * peak, false, "count"});
  for (std::size_t k = 0; k < nbins; ++k)
    if (hist[k] > 0.0) plot.rect(k * bin, 0.0, (k + 1) * bin, hist[k], "#1f77b4", 0.8);
  plot.write(out.path(".svg"));
  out.record(".svg");
}

void nml_probe(const ExperimentConfig& cfg, Parameters& p, TestReport& report, Artifacts& out) {
  const auto replicas = p.count("replicas", 100, 1, 1000000);
  const double t_max = p.real("t_max", 10.0, 0.0, 30.0, true);
  const double t_step = p.real("t_step", 0.5, 0.0, 30.0, true);
  const double fraction_needed = p.real("fraction", 0.95, 0.0, 1.0);
  NmlProbeOptions opts;
  opts.patch_radius = p.real("patch_radius", opts.patch_radius, 0.0, 20.0, true);
  opts.radial_steps = p.count("radial_steps", opts.radial_steps, 1, 10000);
  opts.angular_steps = p.count("angular_steps", opts.angular_steps, 1, 10000);
  opts.bisection_steps = p.count("bisection_steps", opts.bisection_steps, 1, 200);
  p.finish();

  const std::vector<double> grid = uniform_grid(t_step, t_max);
  // First two corona points in the frame Θ₁ = 0, Φ₂ = 0.
  std::vector<std::vector<NmlWitness>> runs(replicas);
  std::vector<std::pair<CoronaPoint, CoronaPoint>> pairs;
  for (std::uint64_t i = 0; i < replicas; ++i) {
    RngStream rng(cfg.seed, i);
    const double r1 = rng.exponential();
    const double r2 = r1 + rng.exponential();
    const double phi1 = rng.angle(), theta2 = rng.angle();
    pairs.emplace_back(CoronaPoint(hyp::BoundaryAngle(0.0), hyp::BoundaryAngle(phi1), r1),
                       CoronaPoint(hyp::BoundaryAngle(theta2), hyp::BoundaryAngle(0.0), r2));
  }
  parallel_for(replicas, cfg.threads, [&](std::uint64_t i) {
    runs[i] = nml_unbounded_probe(pairs[i].first, pairs[i].second, grid, opts);
  });

  std::size_t complete = 0, bad_witnesses = 0;
  double worst_residual = 0.0, widest_bracket = 0.0;
  std::vector<double> found_at(grid.size(), 0.0);
  auto csv = out.open(".csv");
  csv << "replica,t,found,bracket,relative_residual\n";
  for (std::uint64_t i = 0; i < replicas; ++i) {
    bool all = true;
    for (std::size_t k = 0; k < runs[i].size(); ++k) {
      const auto& w = runs[i][k];
      double residual = 0.0;
      if (w.point) {
        found_at[k] += 1.0;
        const double a = separation(*w.point, pairs[i].first), b = separation(*w.point, pairs[i].second);
        residual = std::abs(a - b) / std::max(a, b);
        worst_residual = std::max(worst_residual, residual);
        widest_bracket = std::max(widest_bracket, w.bracket);
        if (!nml_predicate(*w.point, pairs[i].first, pairs[i].second)) ++bad_witnesses;
      } else {
        all = false;
      }
      csv << csv_row({static_cast<double>(i), w.t, w.point ? 1.0 : 0.0, w.bracket, residual});
    }
    complete += all;
  }
  const double fraction = static_cast<double>(complete) / static_cast<double>(replicas);
  report.statistics["fraction_all_t"] = estimate_json(stats::proportion(complete, replicas));
  report.statistics["max_witness_relative_residual"] = worst_residual;
  report.statistics["max_bracket"] = widest_bracket;
  report.check(fmt::format("witnesses at every t <= {:g} in >= {:g} of replicas", t_max, fraction_needed),
               fraction >= fraction_needed, fmt::format("{} of {}", complete, replicas));
  report.check("every witness satisfies the equal-separation predicate", bad_witnesses == 0,
               fmt::format("{} failures, max residual {:.2e}", bad_witnesses, worst_residual));

  for (double& f : found_at) f /= static_cast<double>(replicas);
  SvgPlot plot("Replicas with an equal-separation witness near the traveler", {0.0, t_max, false, "t"},
               {0.0, 1.05, false, "fraction of replicas"});
  plot.polyline(grid, found_at, "#1f77b4");
  plot.scatter(grid, found_at, {}, "#1f77b4", 0.9);
  plot.hline(fraction_needed, "#000");
  plot.write(out.path(".svg"));
  out.record(".svg");
}

}  // namespace ipvt::experiments
