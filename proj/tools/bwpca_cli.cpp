// Command-line harness: dataset generation, GPCA/TPCA comparisons, and
// machine-readable reports.

#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bwpca/experiments.hpp"

namespace {

using namespace bwpca;

struct CommonOpts {
  std::uint64_t seed = 0;
  double epsilon = kDefaultEpsilon;
  int restarts = 5;
  int components = 2;
  std::string out;
  std::string format = "json";
  std::string plot;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--epsilon", o.epsilon, "geodesic interval safety margin");
  cmd->add_option("--restarts", o.restarts, "solver restarts");
  cmd->add_option("--components", o.components, "number of components to fit");
  cmd->add_option("--out", o.out, "output path (stdout when omitted)");
  cmd->add_option("--format", o.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--plot", o.plot, "write an SVG scatter to this path");
}

SolverConfig make_config(const CommonOpts& o) {
  SolverConfig cfg;
  cfg.seed = o.seed;
  cfg.epsilon = o.epsilon;
  cfg.restarts = o.restarts;
  return cfg;
}

void emit(const std::string& content, const std::string& path) {
  if (path.empty())
    std::cout << content;
  else
    save_text(path, content);
}

int finish_comparison(const GaussianDataset& data, const CommonOpts& opts,
                      const std::string& id) {
  const auto cmp = run_comparison(data, make_config(opts), opts.components, id);
  emit(cmp.report.dump(2) + "\n", opts.out);
  if (!opts.plot.empty()) {
    std::vector<GeodesicSegment> segs;
    for (const auto& c : cmp.gpca_components) segs.push_back(c.segment);
    save_text(opts.plot, render_svg(data, segs));
  }
  return cmp.report.at("converged").get<bool>() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic PCA of centered Gaussians under the Bures-Wasserstein metric"};
  app.require_subcommand(1);

  // grid
  auto* grid = app.add_subcommand("grid", "diagonal-matrix grid experiment");
  CommonOpts grid_opts;
  double a2_lo = 1.0, a2_hi = 3.0, b2_lo = 1.0, b2_hi = 2.0;
  int na = 5, nb = 5;
  add_common(grid, grid_opts);
  grid->add_option("--a2-lo", a2_lo);
  grid->add_option("--a2-hi", a2_hi);
  grid->add_option("--b2-lo", b2_lo);
  grid->add_option("--b2-hi", b2_hi);
  grid->add_option("--na", na);
  grid->add_option("--nb", nb);

  // circle
  auto* circle = app.add_subcommand("circle", "equal-eigenvalue circle experiment");
  CommonOpts circle_opts;
  double ca = 1.8, cb = 0.2, opening = 0.05;
  int cn = 20;
  add_common(circle, circle_opts);
  circle->add_option("--a", ca, "larger standard deviation");
  circle->add_option("--b", cb, "smaller standard deviation");
  circle->add_option("--n", cn, "number of matrices (even)");
  circle->add_option("--opening", opening, "circle opening fraction in [0,1)");

  // random-trials
  auto* trials_cmd = app.add_subcommand("random-trials",
                                        "repeated uniform spectral datasets");
  CommonOpts trials_opts;
  int trials = 20, trial_n = 50;
  SpectralRanges ranges;
  add_common(trials_cmd, trials_opts);
  trials_cmd->add_option("--trials", trials);
  trials_cmd->add_option("--n", trial_n);
  trials_cmd->add_option("--a-lo", ranges.a_lo);
  trials_cmd->add_option("--a-hi", ranges.a_hi);
  trials_cmd->add_option("--b-lo", ranges.b_lo);
  trials_cmd->add_option("--b-hi", ranges.b_hi);

  // distortion-curve
  auto* curve_cmd = app.add_subcommand("distortion-curve",
                                       "improvement vs eccentricity ratio");
  CommonOpts curve_opts;
  std::vector<double> ratios{0.2, 0.4, 0.6, 0.8};
  int curve_n = 20, curve_trials = 5;
  double curve_opening = 0.05;
  add_common(curve_cmd, curve_opts);
  curve_cmd->add_option("--ratios", ratios, "ratios |a-b|/|a+b| in (0,1)");
  curve_cmd->add_option("--n", curve_n);
  curve_cmd->add_option("--trials", curve_trials, "fits per ratio, best kept");
  curve_cmd->add_option("--opening", curve_opening);

  // fit
  auto* fit = app.add_subcommand("fit", "fit a user dataset (JSON or CSV)");
  CommonOpts fit_opts;
  std::string input;
  add_common(fit, fit_opts);
  fit->add_option("--input", input, "dataset file")->required();

  // oracle-1d
  auto* oracle = app.add_subcommand("oracle-1d",
                                    "univariate quantile-isometry oracle");
  CommonOpts oracle_opts;
  int on = 20;
  bool centered = false;
  add_common(oracle, oracle_opts);
  oracle->add_option("--n", on, "number of random Gaussians");
  oracle->add_flag("--centered", centered,
                   "zero means; also cross-check against the general solver");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*grid) {
      return finish_comparison(gen_grid(a2_lo, a2_hi, b2_lo, b2_hi, na, nb),
                               grid_opts, "grid");
    }
    if (*circle) {
      return finish_comparison(gen_circle(ca, cb, cn, opening), circle_opts,
                               "circle");
    }
    if (*fit) {
      return finish_comparison(load_dataset(input), fit_opts, "fit");
    }
    if (*trials_cmd) {
      SolverConfig cfg = make_config(trials_opts);
      std::vector<double> improvements;
      Json per_trial = Json::array();
      bool all_converged = true;
      for (int t = 0; t < trials; ++t) {
        cfg.seed = trials_opts.seed + 1000003ull * t;
        const auto data = gen_random_spectral(trial_n, ranges, cfg.seed);
        const auto cmp = run_comparison(data, cfg, 1, "random-trials");
        improvements.push_back(cmp.improvement_pct);
        all_converged =
            all_converged && cmp.report.at("converged").get<bool>();
        per_trial.push_back({{"trial", t},
                             {"tpca_cost", cmp.tpca_cost},
                             {"gpca_cost", cmp.gpca_cost},
                             {"improvement_pct", cmp.improvement_pct}});
      }
      std::vector<double> sorted = improvements;
      std::sort(sorted.begin(), sorted.end());
      double mean = 0;
      for (double v : improvements) mean += v;
      mean /= improvements.size();
      const double median = sorted[sorted.size() / 2];
      Json report{{"experiment", "random-trials"},
                  {"version", kVersion},
                  {"config", config_to_json(cfg)},
                  {"trials", trials},
                  {"n", trial_n},
                  {"ranges",
                   {{"a", {ranges.a_lo, ranges.a_hi}},
                    {"b", {ranges.b_lo, ranges.b_hi}},
                    {"theta", {ranges.theta_lo, ranges.theta_hi}}}},
                  {"mean_improvement_pct", mean},
                  {"median_improvement_pct", median},
                  {"per_trial", per_trial},
                  {"converged", all_converged}};
      emit(report.dump(2) + "\n", trials_opts.out);
      return all_converged ? 0 : 3;
    }
    if (*curve_cmd) {
      const auto pts = run_distortion_curve(ratios, curve_n, curve_trials,
                                            make_config(curve_opts),
                                            curve_opening);
      if (curve_opts.format == "csv") {
        emit(distortion_curve_csv(pts), curve_opts.out);
      } else {
        Json arr = Json::array();
        for (const auto& p : pts)
          arr.push_back({{"ratio", p.ratio},
                         {"tpca_cost", p.tpca_cost},
                         {"gpca_cost", p.gpca_cost},
                         {"improvement_pct", p.improvement_pct},
                         {"predicted_distortion", p.predicted_distortion}});
        Json report{{"experiment", "distortion-curve"},
                    {"version", kVersion},
                    {"config", config_to_json(make_config(curve_opts))},
                    {"points", arr}};
        emit(report.dump(2) + "\n", curve_opts.out);
      }
      return 0;
    }
    if (*oracle) {
      std::mt19937_64 rng(oracle_opts.seed);
      std::uniform_real_distribution<double> um(-2.0, 2.0);
      std::uniform_real_distribution<double> us(0.5, 3.0);
      std::vector<Gaussian1D> gs;
      for (int i = 0; i < on; ++i)
        gs.push_back({centered ? 0.0 : um(rng), us(rng)});
      const auto line = fit_1d_gpca(gs);
      Json report{{"experiment", "oracle-1d"},
                  {"version", kVersion},
                  {"seed", oracle_opts.seed},
                  {"n", on},
                  {"centered", centered},
                  {"line",
                   {{"center", {line.center_mean, line.center_sigma}},
                    {"direction", {line.dir_mean, line.dir_sigma}}}},
                  {"cost", line.cost},
                  {"projection_times", line.projection_times},
                  {"degenerate", line.degenerate}};
      if (centered) {
        SolverConfig cfg = make_config(oracle_opts);
        const auto cc = crosscheck_with_solver(gs, cfg);
        report["crosscheck"] = {{"solver_cost", cc.solver_cost},
                                {"oracle_cost", cc.oracle_cost},
                                {"cost_gap", cc.cost_gap},
                                {"max_time_gap", cc.max_time_gap}};
      }
      emit(report.dump(2) + "\n", oracle_opts.out);
      return 0;
    }
  } catch (const std::domain_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
