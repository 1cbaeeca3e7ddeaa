#ifndef BWPCA_DATASET_HPP
#define BWPCA_DATASET_HPP

#include <random>
#include <stdexcept>
#include <vector>

#include "bwpca/spd.hpp"

namespace bwpca {

/// Input collection Sigma_1..Sigma_n with precomputed SPD square roots.
class GaussianDataset {
public:
  explicit GaussianDataset(std::vector<SpdMatrix> matrices)
      : matrices_(std::move(matrices)) {
    if (matrices_.size() < 2)
      throw std::invalid_argument("GaussianDataset: need at least 2 matrices");
    const int d = matrices_.front().dim();
    roots_.reserve(matrices_.size());
    for (const auto& m : matrices_) {
      if (m.dim() != d)
        throw std::invalid_argument("GaussianDataset: inconsistent dimensions");
      roots_.push_back(spd_sqrt(m));
    }
  }

  int dim() const { return matrices_.front().dim(); }
  int size() const { return static_cast<int>(matrices_.size()); }
  const std::vector<SpdMatrix>& matrices() const { return matrices_; }
  const std::vector<SpdMatrix>& roots() const { return roots_; }

private:
  std::vector<SpdMatrix> matrices_;
  std::vector<SpdMatrix> roots_;
};

/// Regular grid of diagonal matrices diag(a_i^2, b_j^2) with a^2, b^2
/// equally spaced over the given ranges.
inline GaussianDataset gen_grid(double a2_lo = 1.0, double a2_hi = 3.0,
                                double b2_lo = 1.0, double b2_hi = 2.0,
                                int na = 5, int nb = 5) {
  if (a2_lo <= 0 || b2_lo <= 0 || na < 2 || nb < 2)
    throw std::invalid_argument("gen_grid: ranges must be positive, na, nb >= 2");
  std::vector<SpdMatrix> out;
  out.reserve(static_cast<size_t>(na) * nb);
  for (int i = 0; i < na; ++i) {
    const double a2 = a2_lo + (a2_hi - a2_lo) * i / (na - 1);
    for (int j = 0; j < nb; ++j) {
      const double b2 = b2_lo + (b2_hi - b2_lo) * j / (nb - 1);
      Matrix m = Matrix::Zero(2, 2);
      m(0, 0) = a2;
      m(1, 1) = b2;
      out.emplace_back(m);
    }
  }
  return GaussianDataset(std::move(out));
}

/// Matrices Sigma(a, b, theta_i) with theta_i = i pi (1 - opening) / n:
/// equal eigenvalues, rotating orientation, slightly open circle in cone
/// coordinates when opening > 0.
inline GaussianDataset gen_circle(double a, double b, int n,
                                  double opening = 0.05) {
  if (!(a > b && b > 0)) throw std::invalid_argument("gen_circle: need a > b > 0");
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("gen_circle: n must be even, >= 2");
  if (opening < 0 || opening >= 1)
    throw std::invalid_argument("gen_circle: opening must be in [0, 1)");
  const double pi = 3.14159265358979323846;
  std::vector<SpdMatrix> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i)
    out.push_back(spectral_to_spd({a, b, i * pi * (1.0 - opening) / n}));
  return GaussianDataset(std::move(out));
}

struct SpectralRanges {
  double a_lo = 0.5, a_hi = 2.0;
  double b_lo = 0.5, b_hi = 2.0;
  double theta_lo = 0.0, theta_hi = 3.14159265358979323846;
};

/// n matrices with (a, b, theta) i.i.d. uniform on the given ranges.
inline GaussianDataset gen_random_spectral(int n, const SpectralRanges& r,
                                           std::uint64_t seed) {
  if (r.a_lo <= 0 || r.b_lo <= 0)
    throw std::invalid_argument("gen_random_spectral: ranges must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ua(r.a_lo, r.a_hi);
  std::uniform_real_distribution<double> ub(r.b_lo, r.b_hi);
  std::uniform_real_distribution<double> ut(r.theta_lo, r.theta_hi);
  std::vector<SpdMatrix> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(spectral_to_spd({ua(rng), ub(rng), ut(rng)}));
  return GaussianDataset(std::move(out));
}

/// Random SPD matrix in dimension d (test and probe helper): Q D Q^T with
/// log-uniform eigenvalues.
inline SpdMatrix random_spd(int d, std::mt19937_64& rng, double eig_lo = 0.3,
                            double eig_hi = 3.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  std::uniform_real_distribution<double> u(std::log(eig_lo), std::log(eig_hi));
  Eigen::VectorXd ev(d);
  for (int i = 0; i < d; ++i) ev(i) = std::exp(u(rng));
  return SpdMatrix(symmetrize(q * ev.asDiagonal() * q.transpose()));
}

/// Haar-ish random rotation (QR of a Gaussian matrix, determinant fixed).
inline Rotation random_rotation(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return Rotation(q);
}

}  // namespace bwpca

#endif  // BWPCA_DATASET_HPP
