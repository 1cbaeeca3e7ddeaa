#ifndef BWPCA_GEODESIC_HPP
#define BWPCA_GEODESIC_HPP

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "bwpca/spd.hpp"

namespace bwpca {

inline constexpr double kDefaultEpsilon = 1e-3;

/// Admissible time interval of the line t -> A + tX, from the extreme
/// eigenvalues of X A^{-1} (symmetric when X is horizontal at A). Ends may
/// be infinite; finite ends carry the safety margin epsilon.
inline std::pair<double, double> admissible_interval(const FiberRep& a,
                                                     const Matrix& x,
                                                     double epsilon) {
  if (epsilon <= 0) throw std::invalid_argument("admissible_interval: epsilon must be positive");
  const auto hc = horizontal_check(a, x);
  if (!hc.horizontal)
    throw std::invalid_argument(
        "admissible_interval: direction is not horizontal, residual = " +
        std::to_string(hc.residual));
  const Matrix k = symmetrize(x * a.mat().inverse());
  Eigen::SelfAdjointEigenSolver<Matrix> es(k, Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  double lmax = es.eigenvalues().maxCoeff();
  // Near-translational eigenvalues count as zero.
  if (std::abs(lmin) < 1e-12) lmin = 0.0;
  if (std::abs(lmax) < 1e-12) lmax = 0.0;
  if (lmin == 0.0 && lmax == 0.0)
    throw std::domain_error("admissible_interval: degenerate direction (X A^{-1} = 0)");
  const double inf = std::numeric_limits<double>::infinity();
  if (lmax < 0.0) return {-inf, -1.0 / lmin - epsilon};
  if (lmin > 0.0) return {-1.0 / lmax + epsilon, inf};
  if (lmin == 0.0) return {-1.0 / lmax + epsilon, inf};
  if (lmax == 0.0) return {-inf, -1.0 / lmin - epsilon};
  return {-1.0 / lmax + epsilon, -1.0 / lmin - epsilon};
}

/// A Bures-Wasserstein geodesic as the projection of a horizontal line:
/// Sigma(t) = pi(A + tX) for t in [t_min, t_max].
struct GeodesicSegment {
  FiberRep base;
  Matrix direction;  // unit norm, horizontal at base
  double t_min;
  double t_max;
  double epsilon;

  static GeodesicSegment make(const FiberRep& a, const Matrix& x,
                              double epsilon = kDefaultEpsilon) {
    if (std::abs(x.norm() - 1.0) > 1e-10)
      throw std::invalid_argument("GeodesicSegment: direction must have unit norm");
    auto [lo, hi] = admissible_interval(a, x, epsilon);
    return GeodesicSegment{a, x, lo, hi, epsilon};
  }
};

inline double clip_time(const GeodesicSegment& seg, double t) {
  return std::min(std::max(t, seg.t_min), seg.t_max);
}

inline SpdMatrix geodesic_eval(const GeodesicSegment& seg, double t) {
  if (t < seg.t_min || t > seg.t_max)
    throw std::out_of_range("geodesic_eval: t outside admissible interval");
  const Matrix at = seg.base.mat() + t * seg.direction;
  return SpdMatrix(symmetrize(at * at.transpose()));
}

/// Unclipped orthogonal-projection parameter of B onto the line t -> A + tX.
inline double projection_time(const GeodesicSegment& seg, const Matrix& b) {
  const Matrix diff = b - seg.base.mat();
  return (diff.array() * seg.direction.array()).sum() /
         seg.direction.squaredNorm();
}

/// Squared Frobenius distance from S^{1/2} Q to the clipped projection point.
inline double residual(const GeodesicSegment& seg, const SpdMatrix& s,
                       const Rotation& q) {
  const Matrix b = spd_sqrt(s).mat() * q.mat();
  const double t = clip_time(seg, projection_time(seg, b));
  return (seg.base.mat() + t * seg.direction - b).squaredNorm();
}

}  // namespace bwpca

#endif  // BWPCA_GEODESIC_HPP
