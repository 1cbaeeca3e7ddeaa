#ifndef BWPCA_EXPERIMENTS_HPP
#define BWPCA_EXPERIMENTS_HPP

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "bwpca/io.hpp"
#include "bwpca/univariate.hpp"

namespace bwpca {

inline Json config_to_json(const SolverConfig& cfg) {
  return Json{{"epsilon", cfg.epsilon},
              {"restarts", cfg.restarts},
              {"outer_max_iters", cfg.outer_max_iters},
              {"outer_tol", cfg.outer_tol},
              {"seed", cfg.seed},
              {"inner",
               {{"grad_tol", cfg.inner.grad_tol},
                {"max_iters", cfg.inner.max_iters},
                {"armijo_c", cfg.inner.armijo_c},
                {"initial_step", cfg.inner.initial_step},
                {"backtrack", cfg.inner.backtrack}}}};
}

struct ComparisonResult {
  double tpca_cost;
  double gpca_cost;
  double improvement_pct;
  std::vector<PrincipalComponent> gpca_components;
  TpcaResult tpca;
  std::vector<GeodesicSegment> tpca_segments;
  Json report;
};

/// Fit TPCA and GPCA on a dataset and report costs of the first components,
/// evaluated through the same lifted objective. GPCA is TPCA-seeded, so the
/// improvement is nonnegative up to solver tolerance.
inline ComparisonResult run_comparison(const GaussianDataset& data,
                                       const SolverConfig& cfg,
                                       int components = 2,
                                       const std::string& experiment_id = "fit") {
  const auto t0 = std::chrono::steady_clock::now();
  const int max_comp = data.dim() * (data.dim() + 1) / 2;
  components = std::min(components, max_comp);

  TpcaResult tpca = fit_tpca(data, components);
  std::vector<GeodesicSegment> tpca_segments;
  for (int j = 0; j < components; ++j) {
    if (tpca.eigenvalues[j] <= 1e-14) break;
    tpca_segments.push_back(tpca_component_as_segment(tpca, j, cfg.epsilon));
  }
  const double tpca_cost =
      tpca_segments.empty()
          ? 0.0
          : fixed_segment_cost(tpca_segments[0], data, cfg.inner).cost;

  std::vector<PrincipalComponent> gpca_components;
  gpca_components.push_back(fit_first_component(data, cfg));
  if (components >= 2)
    gpca_components.push_back(
        fit_second_component(data, gpca_components[0], cfg));
  for (int k = 3; k <= components; ++k)
    gpca_components.push_back(fit_higher_component(data, gpca_components, cfg));
  const double gpca_cost = gpca_components[0].cost;
  const double improvement_pct =
      tpca_cost > 0 ? 100.0 * (tpca_cost - gpca_cost) / tpca_cost : 0.0;
  ComparisonResult out{tpca_cost,
                       gpca_cost,
                       improvement_pct,
                       std::move(gpca_components),
                       std::move(tpca),
                       std::move(tpca_segments),
                       Json{}};

  const auto dispersion = explained_dispersion(data, out.gpca_components);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();

  Json comps = Json::array();
  bool all_converged = true;
  for (const auto& c : out.gpca_components) {
    comps.push_back(component_to_json(c));
    all_converged = all_converged && c.converged;
  }
  Json disp = Json::array();
  for (const auto& e : dispersion.entries)
    disp.push_back({{"order", e.order}, {"cost", e.cost}, {"fraction", e.fraction}});

  out.report = Json{{"experiment", experiment_id},
                    {"version", kVersion},
                    {"config", config_to_json(cfg)},
                    {"n", data.size()},
                    {"dim", data.dim()},
                    {"tpca_cost", out.tpca_cost},
                    {"gpca_cost", out.gpca_cost},
                    {"improvement_pct", out.improvement_pct},
                    {"total_dispersion", dispersion.total},
                    {"zero_dispersion", dispersion.zero_dispersion},
                    {"explained", disp},
                    {"gpca_components", comps},
                    {"tpca", tpca_to_json(out.tpca)},
                    {"converged", all_converged},
                    {"wall_clock_ms", ms}};
  return out;
}

struct DistortionPoint {
  double ratio;
  double tpca_cost;
  double gpca_cost;
  double improvement_pct;
  double predicted_distortion;
};

/// Average of the distortion expansion 1 - r^2 cos^2(theta) over the circle
/// of orientations, by trapezoidal quadrature.
inline double predicted_distortion_avg(double ratio, int quad_points = 2000) {
  const double pi = 3.14159265358979323846;
  double acc = 0.0;
  for (int i = 0; i < quad_points; ++i) {
    const double theta = pi * (i + 0.5) / quad_points;
    const double c = std::cos(theta);
    acc += 1.0 - ratio * ratio * c * c;
  }
  return acc / quad_points;
}

/// Improvement of GPCA over TPCA on circle datasets across eccentricity
/// ratios |a-b|/|a+b|, best of trials_per_ratio independent fits.
inline std::vector<DistortionPoint> run_distortion_curve(
    const std::vector<double>& ratios, int n, int trials_per_ratio,
    const SolverConfig& base_cfg, double opening = 0.05) {
  std::vector<DistortionPoint> out;
  for (double r : ratios) {
    if (!(r > 0 && r < 1))
      throw std::invalid_argument("run_distortion_curve: ratios must be in (0, 1)");
    const double a = 1.0 + r, b = 1.0 - r;  // a + b = 2
    const auto data = gen_circle(a, b, n, opening);
    double best_gpca = std::numeric_limits<double>::infinity();
    double tpca_cost = 0.0;
    for (int trial = 0; trial < trials_per_ratio; ++trial) {
      SolverConfig cfg = base_cfg;
      cfg.seed = base_cfg.seed + 977 * trial + static_cast<std::uint64_t>(1000 * r);
      const auto cmp = run_comparison(data, cfg, 1, "distortion-curve");
      tpca_cost = cmp.tpca_cost;
      best_gpca = std::min(best_gpca, cmp.gpca_cost);
    }
    const double imp =
        tpca_cost > 0 ? 100.0 * (tpca_cost - best_gpca) / tpca_cost : 0.0;
    out.push_back({r, tpca_cost, best_gpca, imp, predicted_distortion_avg(r)});
  }
  return out;
}

inline std::string distortion_curve_csv(const std::vector<DistortionPoint>& pts) {
  std::ostringstream os;
  os.precision(12);
  os << "ratio,tpca_cost,gpca_cost,improvement_pct,predicted_distortion\n";
  for (const auto& p : pts)
    os << p.ratio << "," << p.tpca_cost << "," << p.gpca_cost << ","
       << p.improvement_pct << "," << p.predicted_distortion << "\n";
  return os.str();
}

}  // namespace bwpca

#endif  // BWPCA_EXPERIMENTS_HPP
