#ifndef BWPCA_ROTATION_HPP
#define BWPCA_ROTATION_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "bwpca/spd.hpp"

namespace bwpca {

inline Matrix skew_part(const Matrix& m) { return 0.5 * (m - m.transpose()); }

inline void check_skew(const Matrix& v) {
  if ((v + v.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("expected a skew-symmetric matrix");
}

/// Riemannian exponential of SO_d at Q along the tangent vector QV:
/// Q expm(V). Closed form for d = 2, scaling-and-squaring otherwise.
inline Rotation so_exp(const Rotation& q, const Matrix& v) {
  check_skew(v);
  Matrix e;
  if (v.rows() == 2) {
    const double theta = v(1, 0);
    e = rotation2d(theta);
  } else if (v.rows() == 1) {
    e = Matrix::Identity(1, 1);
  } else {
    e = v.exp();
  }
  Matrix qe = q.mat() * e;
  // Re-orthogonalize to keep long products inside the group.
  Eigen::JacobiSVD<Matrix> svd(qe, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Rotation(svd.matrixU() * svd.matrixV().transpose());
}

using RotationObjective = std::function<double(const Rotation&)>;
/// Euclidean gradient of the objective seen as a function on R^{dxd}.
using EuclideanGradient = std::function<Matrix(const Rotation&)>;

/// Riemannian gradient at Q as a skew matrix V = skew(Q^T G), with G the
/// Euclidean gradient. Central finite differences with step 1e-6 when no
/// analytic gradient is supplied.
inline Matrix riemannian_grad(const RotationObjective& f, const Rotation& q,
                              const EuclideanGradient* euclidean = nullptr) {
  const int d = q.dim();
  Matrix g(d, d);
  if (euclidean) {
    g = (*euclidean)(q);
  } else {
    const double h = 1e-6;
    // Differentiate along the group through so_exp so iterates stay feasible.
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < i; ++j) {
        Matrix e = Matrix::Zero(d, d);
        e(i, j) = 1.0;
        e(j, i) = -1.0;
        const double fp = f(so_exp(q, h * e));
        const double fm = f(so_exp(q, -h * e));
        const double der = (fp - fm) / (2.0 * h);
        // der is the derivative along the basis skew direction e; assemble
        // the gradient in the skew basis (accounting for |e|^2 = 2).
        g(i, j) = der;
        g(j, i) = -der;
      }
      g(i, i) = 0.0;
    }
    return 0.5 * g;  // gradient w.r.t. the Frobenius inner product
  }
  return skew_part(q.mat().transpose() * g);
}

struct DescentConfig {
  double grad_tol = 1e-8;
  int max_iters = 500;
  double armijo_c = 1e-4;
  double initial_step = 1.0;
  double backtrack = 0.5;
  int max_halvings = 50;
};

struct DescentResult {
  Rotation q;
  double cost;
  int iterations;
  bool stalled;
};

/// Riemannian gradient descent on SO_d with Armijo backtracking along so_exp.
inline DescentResult rotation_descent(const RotationObjective& f,
                                      const Rotation& q0,
                                      const DescentConfig& cfg = {},
                                      const EuclideanGradient* euclidean = nullptr) {
  Rotation q = q0;
  double cost = f(q);
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Matrix grad = riemannian_grad(f, q, euclidean);
    const double gnorm2 = grad.squaredNorm();
    if (std::sqrt(gnorm2) < cfg.grad_tol) return {q, cost, it, false};
    double step = cfg.initial_step;
    bool accepted = false;
    for (int h = 0; h < cfg.max_halvings; ++h) {
      const Rotation cand = so_exp(q, -step * grad);
      const double c = f(cand);
      if (c <= cost - cfg.armijo_c * step * gnorm2) {
        q = cand;
        cost = c;
        accepted = true;
        break;
      }
      step *= cfg.backtrack;
    }
    if (!accepted) return {q, cost, it, true};
  }
  return {q, cost, cfg.max_iters, false};
}

/// Special-orthogonal minimizer of |M - C Q| via SVD of C^T M with
/// determinant correction.
inline Rotation procrustes_init(const Matrix& m, const Matrix& c) {
  {
    Eigen::JacobiSVD<Matrix> rank_check(c);
    const auto& sv = rank_check.singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * sv(0))
      throw std::runtime_error("procrustes_init: rank-deficient C");
  }
  Eigen::JacobiSVD<Matrix> svd(c.transpose() * m,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const int d = static_cast<int>(m.rows());
  Matrix u = svd.matrixU();
  Matrix v = svd.matrixV();
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(d);
  if ((u * v.transpose()).determinant() < 0) diag(d - 1) = -1.0;
  return Rotation(u * diag.asDiagonal() * v.transpose());
}

}  // namespace bwpca

#endif  // BWPCA_ROTATION_HPP
