#ifndef BWPCA_SPD_HPP
#define BWPCA_SPD_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace bwpca {

using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Symmetric positive definite matrix (a centered Gaussian's covariance).
/// Construction validates symmetry and positive definiteness; the stored
/// matrix is symmetrized.
class SpdMatrix {
public:
  explicit SpdMatrix(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
      throw std::invalid_argument("SpdMatrix: matrix must be square");
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * scale)
      throw std::domain_error("SpdMatrix: not symmetric, max|M_ij - M_ji| = " +
                              std::to_string(asym));
    m_ = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin <= 1e-12 * lmax || lmin <= 0.0)
      throw std::domain_error(
          "SpdMatrix: not positive definite, smallest eigenvalue = " +
          std::to_string(lmin));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }

private:
  Matrix m_;
};

/// Invertible matrix A with pi(A) = A A^T; a representative of a fiber.
class FiberRep {
public:
  explicit FiberRep(const Matrix& m) : m_(m) {
    if (m.rows() != m.cols() || m.rows() < 1)
      throw std::invalid_argument("FiberRep: matrix must be square");
    Eigen::JacobiSVD<Matrix> svd(m);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(m.rows() - 1);
    if (smin <= 1e-12 * smax)
      throw std::domain_error("FiberRep: singular matrix, sigma_min/sigma_max = " +
                              std::to_string(smin / smax));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }

private:
  Matrix m_;
};

/// Element of SO_d.
class Rotation {
public:
  explicit Rotation(const Matrix& q) : m_(q) {
    if (q.rows() != q.cols() || q.rows() < 1)
      throw std::invalid_argument("Rotation: matrix must be square");
    const int d = static_cast<int>(q.rows());
    const double ortho = (q.transpose() * q - Matrix::Identity(d, d)).norm();
    if (ortho > 1e-10)
      throw std::domain_error("Rotation: not orthogonal, |Q^T Q - I| = " +
                              std::to_string(ortho));
    if (std::abs(q.determinant() - 1.0) > 1e-10)
      throw std::domain_error("Rotation: determinant is not +1");
  }

  static Rotation identity(int d) { return Rotation(Matrix::Identity(d, d)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }

private:
  Matrix m_;
};

/// Spectral coordinates (a, b, theta) of a 2x2 SPD matrix:
/// Sigma = P_theta diag(a^2, b^2) P_theta^T.
struct SpectralCoords {
  double a;
  double b;
  double theta;
};

/// Cone coordinates (x, y, z) of a 2x2 SPD matrix [[x+y, z], [z, x-y]].
struct ConeCoords {
  double x;
  double y;
  double z;
};

// ---------------------------------------------------------------------------
// Basic operations
// ---------------------------------------------------------------------------

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// The unique SPD square root, via symmetric eigendecomposition.
inline SpdMatrix spd_sqrt(const SpdMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.mat());
  Matrix r = es.eigenvectors() *
             es.eigenvalues().cwiseSqrt().asDiagonal() *
             es.eigenvectors().transpose();
  return SpdMatrix(symmetrize(r));
}

/// Inverse SPD square root.
inline SpdMatrix spd_inv_sqrt(const SpdMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.mat());
  Matrix r = es.eigenvectors() *
             es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
             es.eigenvectors().transpose();
  return SpdMatrix(symmetrize(r));
}

/// Square root of a symmetric PSD matrix given as a raw matrix (internal
/// helper for products like S1^{1/2} S2 S1^{1/2} whose tiny eigenvalues may
/// dip below the SpdMatrix admission threshold).
inline Matrix psd_sqrt_raw(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
  return symmetrize(es.eigenvectors() *
                    es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                    es.eigenvectors().transpose());
}

/// Squared Bures-Wasserstein distance
/// tr[S1 + S2 - 2 (S1^{1/2} S2 S1^{1/2})^{1/2}], clamped at zero.
inline double bures_wasserstein_sq(const SpdMatrix& s1, const SpdMatrix& s2) {
  const Matrix r1 = spd_sqrt(s1).mat();
  const Matrix cross = psd_sqrt_raw(r1 * s2.mat() * r1);
  const double v = s1.mat().trace() + s2.mat().trace() - 2.0 * cross.trace();
  return std::max(v, 0.0);
}

inline double bures_wasserstein(const SpdMatrix& s1, const SpdMatrix& s2) {
  return std::sqrt(bures_wasserstein_sq(s1, s2));
}

/// Monge map T = S1^{-1/2} (S1^{1/2} S2 S1^{1/2})^{1/2} S1^{-1/2},
/// the optimal transport map from S1 to S2. Satisfies T S1 T = S2.
inline SpdMatrix monge_map(const SpdMatrix& s1, const SpdMatrix& s2) {
  const Matrix r1 = spd_sqrt(s1).mat();
  const Matrix ir1 = spd_inv_sqrt(s1).mat();
  const Matrix cross = psd_sqrt_raw(r1 * s2.mat() * r1);
  return SpdMatrix(symmetrize(ir1 * cross * ir1));
}

/// Bundle projection pi(A) = A A^T.
inline SpdMatrix fiber_project(const FiberRep& a) {
  return SpdMatrix(symmetrize(a.mat() * a.mat().transpose()));
}

/// Differential of the projection: dpi_A(X) = X A^T + A X^T.
inline Matrix dpi(const FiberRep& a, const Matrix& x) {
  return x * a.mat().transpose() + a.mat() * x.transpose();
}

struct HorizontalCheck {
  bool horizontal;
  double residual;  // |X^T A - A^T X|
};

/// A tangent vector X at A is horizontal iff X^T A = A^T X.
inline HorizontalCheck horizontal_check(const FiberRep& a, const Matrix& x,
                                        double tol = 1e-9) {
  const double res = (x.transpose() * a.mat() - a.mat().transpose() * x).norm();
  const double scale = x.norm() * a.mat().norm();
  return {res <= tol * (scale > 0 ? scale : 1.0), res};
}

/// Inverse of dpi restricted to the horizontal space: the unique horizontal
/// X with dpi_A(X) = U. Solves K (A A^T) + (A A^T) K = U for symmetric K in
/// an eigenbasis of A A^T, then X = K A.
inline Matrix horizontal_lift(const FiberRep& a, const Matrix& u) {
  const Matrix sigma = symmetrize(a.mat() * a.mat().transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("horizontal_lift: eigendecomposition failed");
  const Matrix& p = es.eigenvectors();
  const Eigen::VectorXd& d = es.eigenvalues();
  Matrix up = p.transpose() * symmetrize(u) * p;
  for (int i = 0; i < d.size(); ++i)
    for (int j = 0; j < d.size(); ++j) up(i, j) /= d(i) + d(j);
  const Matrix k = p * up * p.transpose();
  return symmetrize(k) * a.mat();
}

/// Closest point of the fiber over S2 to the representative A1, i.e. T A1
/// with T the Monge map from pi(A1) to S2.
inline FiberRep align(const FiberRep& a1, const SpdMatrix& s2) {
  const SpdMatrix t = monge_map(fiber_project(a1), s2);
  return FiberRep(t.mat() * a1.mat());
}

/// The rotation attaining the minimal fiber distance:
/// Q* = S2^{-1/2} T S1^{1/2}, with T the Monge map from S1 to S2.
inline Rotation optimal_rotation(const SpdMatrix& s1, const SpdMatrix& s2) {
  const Matrix t = monge_map(s1, s2).mat();
  Matrix q = spd_inv_sqrt(s2).mat() * t * spd_sqrt(s1).mat();
  // Re-orthogonalize against roundoff before validating.
  Eigen::JacobiSVD<Matrix> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Rotation(svd.matrixU() * svd.matrixV().transpose());
}

/// Riemannian logarithm: Log_{S1}(S2) = (T - I) S1 + S1 (T - I).
inline Matrix bw_log(const SpdMatrix& sbase, const SpdMatrix& s) {
  const int d = sbase.dim();
  const Matrix tmi = monge_map(sbase, s).mat() - Matrix::Identity(d, d);
  return symmetrize(tmi * sbase.mat() + sbase.mat() * tmi);
}

/// Bures-Wasserstein metric tensor at Sbase:
/// g(U, V) = 1/2 sum_ij U'_ij V'_ij / (d_i + d_j) in an eigenbasis of Sbase.
inline double bw_metric_inner(const SpdMatrix& sbase, const Matrix& u,
                              const Matrix& v) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sbase.mat());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("bw_metric_inner: eigendecomposition failed");
  const Matrix up = es.eigenvectors().transpose() * symmetrize(u) * es.eigenvectors();
  const Matrix vp = es.eigenvectors().transpose() * symmetrize(v) * es.eigenvectors();
  const Eigen::VectorXd& d = es.eigenvalues();
  double acc = 0.0;
  for (int i = 0; i < d.size(); ++i)
    for (int j = 0; j < d.size(); ++j)
      acc += up(i, j) * vp(i, j) / (d(i) + d(j));
  return 0.5 * acc;
}

inline double bw_metric_norm(const SpdMatrix& sbase, const Matrix& u) {
  return std::sqrt(std::max(bw_metric_inner(sbase, u, u), 0.0));
}

// ---------------------------------------------------------------------------
// d = 2 coordinate systems
// ---------------------------------------------------------------------------

inline Matrix rotation2d(double theta) {
  Matrix p(2, 2);
  p << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return p;
}

inline SpdMatrix spectral_to_spd(const SpectralCoords& c) {
  if (c.a <= 0 || c.b <= 0)
    throw std::domain_error("spectral_to_spd: a and b must be positive");
  const Matrix p = rotation2d(c.theta);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = c.a * c.a;
  d(1, 1) = c.b * c.b;
  return SpdMatrix(symmetrize(p * d * p.transpose()));
}

/// Inverse of spectral_to_spd on the canonical branch a >= b, theta in [0, pi).
inline SpectralCoords spd_to_spectral(const SpdMatrix& s) {
  if (s.dim() != 2)
    throw std::invalid_argument("spd_to_spectral: only d = 2 supported");
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.mat());
  // Eigen sorts ascending; put the larger eigenvalue first.
  const double a = std::sqrt(es.eigenvalues()(1));
  const double b = std::sqrt(es.eigenvalues()(0));
  Eigen::Vector2d v = es.eigenvectors().col(1);
  double theta = std::atan2(v(1), v(0));
  const double pi = 3.14159265358979323846;
  while (theta < 0) theta += pi;
  while (theta >= pi) theta -= pi;
  return {a, b, theta};
}

inline SpdMatrix cone_to_spd(const ConeCoords& c) {
  Matrix m(2, 2);
  m << c.x + c.y, c.z, c.z, c.x - c.y;
  return SpdMatrix(m);  // throws if the image is not SPD
}

inline ConeCoords spd_to_cone(const SpdMatrix& s) {
  if (s.dim() != 2)
    throw std::invalid_argument("spd_to_cone: only d = 2 supported");
  const Matrix& m = s.mat();
  return {0.5 * (m(0, 0) + m(1, 1)), 0.5 * (m(0, 0) - m(1, 1)), m(0, 1)};
}

}  // namespace bwpca

#endif  // BWPCA_SPD_HPP
