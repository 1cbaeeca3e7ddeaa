#ifndef BWPCA_TPCA_HPP
#define BWPCA_TPCA_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bwpca/dataset.hpp"
#include "bwpca/geodesic.hpp"
#include "bwpca/spd.hpp"

namespace bwpca {

struct BarycenterResult {
  SpdMatrix barycenter;
  bool converged;
  int iterations;
};

/// Bures-Wasserstein barycenter by the standard fixed-point iteration
///   Sigma <- Sigma^{-1/2} ((1/n) sum_i (Sigma^{1/2} Sigma_i Sigma^{1/2})^{1/2})^2 Sigma^{-1/2},
/// initialized at the identity scaled to the average trace.
inline BarycenterResult bw_barycenter(const GaussianDataset& data,
                                      double tol = 1e-12,
                                      int max_iters = 1000) {
  const int d = data.dim();
  const int n = data.size();
  double avg_trace = 0.0;
  for (const auto& s : data.matrices()) avg_trace += s.mat().trace();
  avg_trace /= n;
  Matrix sigma = (avg_trace / d) * Matrix::Identity(d, d);
  for (int it = 0; it < max_iters; ++it) {
    const SpdMatrix cur{sigma};
    const Matrix r = spd_sqrt(cur).mat();
    const Matrix ir = spd_inv_sqrt(cur).mat();
    Matrix mean = Matrix::Zero(d, d);
    for (const auto& s : data.matrices()) mean += psd_sqrt_raw(r * s.mat() * r);
    mean /= n;
    const Matrix next = symmetrize(ir * mean * mean * ir);
    const double diff = (next - sigma).norm();
    sigma = next;
    if (diff < tol) return {SpdMatrix(sigma), true, it + 1};
  }
  return {SpdMatrix(sigma), false, max_iters};
}

/// First-order optimality residual |(1/n) sum_i Log_{Sbar}(Sigma_i)|.
inline double barycenter_gradient_norm(const SpdMatrix& sbar,
                                       const GaussianDataset& data) {
  Matrix acc = Matrix::Zero(sbar.dim(), sbar.dim());
  for (const auto& s : data.matrices()) acc += bw_log(sbar, s);
  return (acc / data.size()).norm();
}

/// Linearized Bures-Wasserstein distance at Sbar:
/// |T1 - T2|_{Sbar} = sqrt(tr((T1-T2) Sbar (T1-T2)^T)) with T_i the Monge
/// maps from Sbar to S_i.
inline double linearized_bw(const SpdMatrix& sbar, const SpdMatrix& s1,
                            const SpdMatrix& s2) {
  const Matrix diff = monge_map(sbar, s1).mat() - monge_map(sbar, s2).mat();
  return std::sqrt(std::max((diff * sbar.mat() * diff.transpose()).trace(), 0.0));
}

struct TpcaResult {
  SpdMatrix barycenter;
  bool barycenter_converged;
  std::vector<Matrix> embedded;              // T_i - I
  std::vector<Matrix> principal_directions;  // symmetric, orthonormal in <.,.>_Sbar
  std::vector<double> eigenvalues;           // non-increasing
  std::vector<std::vector<double>> scores;   // n x k
};

namespace detail {

inline double weighted_inner(const Matrix& k1, const Matrix& k2,
                             const Matrix& sbar) {
  return (k1 * sbar * k2).trace();
}

/// Orthonormal basis of S_d for tr(K Sbar K'), built by Gram-Schmidt from
/// the canonical symmetric basis.
inline std::vector<Matrix> symmetric_basis(const Matrix& sbar) {
  const int d = static_cast<int>(sbar.rows());
  std::vector<Matrix> raw;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Matrix e = Matrix::Zero(d, d);
      e(i, j) = e(j, i) = 1.0;
      raw.push_back(e);
    }
  std::vector<Matrix> basis;
  for (auto& e : raw) {
    for (const auto& b : basis) e -= weighted_inner(e, b, sbar) * b;
    const double nrm = std::sqrt(weighted_inner(e, e, sbar));
    if (nrm <= 1e-12)
      throw std::runtime_error("symmetric_basis: Gram-Schmidt collapsed");
    basis.push_back(e / nrm);
  }
  return basis;
}

}  // namespace detail

/// Tangent PCA: Euclidean PCA on the centered transport-map embeddings
/// {T_i - I} under the Sbar-weighted Frobenius inner product.
inline TpcaResult fit_tpca(const GaussianDataset& data, int k) {
  const int d = data.dim();
  const int sym_dim = d * (d + 1) / 2;
  if (k < 1 || k > sym_dim)
    throw std::invalid_argument("fit_tpca: k must be in [1, d(d+1)/2]");
  const auto bary = bw_barycenter(data);
  const SpdMatrix& sbar = bary.barycenter;
  const int n = data.size();

  std::vector<Matrix> embedded;
  embedded.reserve(n);
  for (const auto& s : data.matrices())
    embedded.push_back(monge_map(sbar, s).mat() - Matrix::Identity(d, d));

  const auto basis = detail::symmetric_basis(sbar.mat());
  Eigen::MatrixXd coords(n, sym_dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < sym_dim; ++j)
      coords(i, j) = detail::weighted_inner(embedded[i], basis[j], sbar.mat());
  const Eigen::RowVectorXd mean = coords.colwise().mean();
  coords.rowwise() -= mean;

  const Eigen::MatrixXd cov = coords.transpose() * coords / n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);

  TpcaResult out{sbar, bary.converged, std::move(embedded), {}, {}, {}};
  for (int j = 0; j < k; ++j) {
    const int idx = sym_dim - 1 - j;  // descending eigenvalues
    out.eigenvalues.push_back(std::max(es.eigenvalues()(idx), 0.0));
    Matrix dir = Matrix::Zero(d, d);
    for (int l = 0; l < sym_dim; ++l) dir += es.eigenvectors()(l, idx) * basis[l];
    out.principal_directions.push_back(symmetrize(dir));
  }
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(k);
    for (int j = 0; j < k; ++j) {
      const int idx = sym_dim - 1 - j;
      row[j] = coords.row(i).dot(es.eigenvectors().col(idx));
    }
    out.scores.push_back(std::move(row));
  }
  return out;
}

/// Lift TPCA direction j to a geodesic segment: base Sbar^{1/2}, direction
/// the unit horizontal lift D_j A of the symmetric direction matrix.
inline GeodesicSegment tpca_component_as_segment(const TpcaResult& result,
                                                 int j,
                                                 double epsilon = kDefaultEpsilon) {
  if (j < 0 || j >= static_cast<int>(result.principal_directions.size()))
    throw std::out_of_range("tpca_component_as_segment: index out of range");
  const FiberRep a{spd_sqrt(result.barycenter).mat()};
  Matrix x = result.principal_directions[j] * a.mat();
  x /= x.norm();
  return GeodesicSegment::make(a, x, epsilon);
}

// ---------------------------------------------------------------------------
// Closed-form analysis on the rotated family Sigma, Sigma' = P Sigma P^T
// ---------------------------------------------------------------------------

struct DistortionRatio {
  double exact;   // BW_2^2 / linearized^2
  double approx;  // 1 - ((a-b)/(a+b))^2 cos^2 theta
};

inline DistortionRatio distortion_ratio(double a, double b, double theta) {
  if (a <= 0 || b <= 0) throw std::domain_error("distortion_ratio: a, b must be positive");
  const SpdMatrix sigma = spectral_to_spd({a, b, 0.0});
  const Matrix p = rotation2d(theta);
  const SpdMatrix sigmap{symmetrize(p * sigma.mat() * p.transpose())};
  const double half = 0.5 * (a + b);
  const SpdMatrix sbar{half * half * Matrix::Identity(2, 2)};
  const double lin = linearized_bw(sbar, sigma, sigmap);
  if (lin <= 1e-14)
    throw std::domain_error("distortion_ratio: degenerate theta, zero linearized distance");
  const double r = (a - b) / (a + b);
  const double c = std::cos(theta);
  return {bures_wasserstein_sq(sigma, sigmap) / (lin * lin),
          1.0 - r * r * c * c};
}

/// Sectional curvature term R(U, U', U, U') at the rotated-family barycenter,
/// evaluated through the general formula
///   R = (3/2) sum_ij d_i d_j / (d_i + d_j) [U0, U0']_ij^2
/// with U0, U0' the Sylvester preimages of the two log vectors.
inline double curvature_value(double a, double b, double theta) {
  if (a <= 0 || b <= 0) throw std::domain_error("curvature_value: a, b must be positive");
  const double half = 0.5 * (a + b);
  const SpdMatrix sbar{half * half * Matrix::Identity(2, 2)};
  const SpdMatrix sigma = spectral_to_spd({a, b, 0.0});
  const Matrix p = rotation2d(theta);
  const SpdMatrix sigmap{symmetrize(p * sigma.mat() * p.transpose())};
  const Matrix u = bw_log(sbar, sigma);
  const Matrix up = bw_log(sbar, sigmap);

  Eigen::SelfAdjointEigenSolver<Matrix> es(sbar.mat());
  const Matrix& pv = es.eigenvectors();
  const Eigen::VectorXd& dv = es.eigenvalues();
  auto sylvester = [&](const Matrix& rhs) {
    Matrix r = pv.transpose() * rhs * pv;
    for (int i = 0; i < dv.size(); ++i)
      for (int j = 0; j < dv.size(); ++j) r(i, j) /= dv(i) + dv(j);
    return Matrix(pv * r * pv.transpose());
  };
  const Matrix u0 = sylvester(u);
  const Matrix u0p = sylvester(up);
  const Matrix bracket = pv.transpose() * (u0 * u0p - u0p * u0) * pv;
  double acc = 0.0;
  for (int i = 0; i < dv.size(); ++i)
    for (int j = 0; j < dv.size(); ++j)
      acc += dv(i) * dv(j) / (dv(i) + dv(j)) * bracket(i, j) * bracket(i, j);
  return 1.5 * acc;
}

}  // namespace bwpca

#endif  // BWPCA_TPCA_HPP
