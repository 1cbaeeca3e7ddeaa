#ifndef BWPCA_UNIVARIATE_HPP
#define BWPCA_UNIVARIATE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bwpca/gpca.hpp"

namespace bwpca {

/// Univariate Gaussian N(m, sigma^2).
struct Gaussian1D {
  double mean;
  double sigma;
};

/// W2 between univariate Gaussians: Euclidean distance in (m, sigma).
inline double w2_1d(const Gaussian1D& g1, const Gaussian1D& g2) {
  return std::hypot(g1.mean - g2.mean, g1.sigma - g2.sigma);
}

/// Standard normal quantile. Acklam's rational approximation refined by one
/// Halley step on erfc; absolute error well below 1e-9.
inline double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("norm_quantile: p must be in (0, 1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1);
  } else if (p <= 1 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1);
  }
  // Halley refinement.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2 * 3.14159265358979323846) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

/// First geodesic component of 1D Gaussian GPCA: an orthogonal-distance
/// regression line in the (m, sigma) half-plane, with projection parameters
/// clipped so the line point keeps sigma > 0.
struct Gpca1DResult {
  double center_mean, center_sigma;  // point on the line
  double dir_mean, dir_sigma;        // unit direction
  double t_lo, t_hi;                 // admissible parameter range (sigma > 0)
  std::vector<double> projection_times;
  double cost;
  bool degenerate;  // all points identical
};

inline Gpca1DResult fit_1d_gpca(const std::vector<Gaussian1D>& gs) {
  const int n = static_cast<int>(gs.size());
  if (n < 2) throw std::invalid_argument("fit_1d_gpca: need at least 2 points");
  double mm = 0, ms = 0;
  for (const auto& g : gs) {
    mm += g.mean;
    ms += g.sigma;
  }
  mm /= n;
  ms /= n;
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const auto& g : gs) {
    Eigen::Vector2d v(g.mean - mm, g.sigma - ms);
    scatter += v * v.transpose();
  }
  Gpca1DResult out{mm, ms, 0, 0, 0, 0, {}, 0.0, false};
  if (scatter.norm() < 1e-24) {
    out.degenerate = true;
    out.dir_mean = 1.0;
    out.projection_times.assign(n, 0.0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(scatter);
  Eigen::Vector2d dir = es.eigenvectors().col(1);  // largest eigenvalue
  if (dir(1) < 0 || (dir(1) == 0 && dir(0) < 0)) dir = -dir;
  out.dir_mean = dir(0);
  out.dir_sigma = dir(1);
  // Keep sigma(t) = ms + t * dir_sigma positive on the admissible range.
  const double inf = std::numeric_limits<double>::infinity();
  if (std::abs(dir(1)) < 1e-15) {
    out.t_lo = -inf;
    out.t_hi = inf;
  } else if (dir(1) > 0) {
    out.t_lo = -ms / dir(1) + 1e-12;
    out.t_hi = inf;
  } else {
    out.t_lo = -inf;
    out.t_hi = -ms / dir(1) - 1e-12;
  }
  for (const auto& g : gs) {
    const double t = (g.mean - mm) * dir(0) + (g.sigma - ms) * dir(1);
    const double tc = std::min(std::max(t, out.t_lo), out.t_hi);
    out.projection_times.push_back(tc);
    const double pm = mm + tc * dir(0);
    const double ps = ms + tc * dir(1);
    out.cost += (pm - g.mean) * (pm - g.mean) + (ps - g.sigma) * (ps - g.sigma);
  }
  return out;
}

struct CrosscheckReport {
  double solver_cost;
  double oracle_cost;
  double cost_gap;
  double max_time_gap;  // after centering and sign alignment
};

/// Consistency bridge: run the general solver on the 1x1 covariances of a
/// centered dataset and compare against the quantile-isometry oracle.
inline CrosscheckReport crosscheck_with_solver(const std::vector<Gaussian1D>& gs,
                                               const SolverConfig& cfg = {}) {
  for (const auto& g : gs)
    if (g.mean != 0.0)
      throw std::invalid_argument("crosscheck_with_solver: requires centered Gaussians");
  std::vector<SpdMatrix> mats;
  mats.reserve(gs.size());
  for (const auto& g : gs) {
    Matrix m(1, 1);
    m(0, 0) = g.sigma * g.sigma;
    mats.emplace_back(m);
  }
  const GaussianDataset data(std::move(mats));
  const auto comp = fit_first_component(data, cfg);
  const auto oracle = fit_1d_gpca(gs);

  auto center = [](std::vector<double> v) {
    double m = 0;
    for (double t : v) m += t;
    m /= v.size();
    for (double& t : v) t -= m;
    return v;
  };
  auto ts = center(comp.projection_times);
  auto to = center(oracle.projection_times);
  // Align sign on the largest-magnitude oracle entry.
  int imax = 0;
  for (size_t i = 1; i < to.size(); ++i)
    if (std::abs(to[i]) > std::abs(to[imax])) imax = static_cast<int>(i);
  if (ts[imax] * to[imax] < 0)
    for (double& t : ts) t = -t;
  double max_gap = 0;
  for (size_t i = 0; i < ts.size(); ++i)
    max_gap = std::max(max_gap, std::abs(ts[i] - to[i]));
  return {comp.cost, oracle.cost, std::abs(comp.cost - oracle.cost), max_gap};
}

}  // namespace bwpca

#endif  // BWPCA_UNIVARIATE_HPP
