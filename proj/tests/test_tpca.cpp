#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bwpca/tpca.hpp"

using namespace bwpca;

namespace {
const double kPi = 3.14159265358979323846;

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}
}  // namespace

TEST_CASE("barycenter examples") {
  std::mt19937_64 rng(89);
  const SpdMatrix s = random_spd(3, rng);
  const GaussianDataset rep({s, s});
  const auto res = bw_barycenter(rep);
  CHECK(res.converged);
  CHECK((res.barycenter.mat() - s.mat()).norm() < 1e-9);

  // rotated family: barycenter ((a+b)/2)^2 I
  const double a = 2.0, b = 1.0;
  std::vector<SpdMatrix> fam;
  const int n = 20;
  for (int i = 0; i < n; ++i) fam.push_back(spectral_to_spd({a, b, i * kPi / n}));
  const auto rf = bw_barycenter(GaussianDataset(std::move(fam)));
  CHECK(rf.converged);
  CHECK((rf.barycenter.mat() - 2.25 * Matrix::Identity(2, 2)).norm() < 1e-8);

  // two commuting diagonals: component-wise midpoint of the roots
  const double a1 = 1.2, b1 = 0.7, a2 = 1.9, b2 = 1.1;
  const auto two = bw_barycenter(GaussianDataset(
      {SpdMatrix(diag2(a1 * a1, b1 * b1)), SpdMatrix(diag2(a2 * a2, b2 * b2))}));
  const Matrix expect =
      diag2(std::pow((a1 + a2) / 2, 2), std::pow((b1 + b2) / 2, 2));
  CHECK((two.barycenter.mat() - expect).norm() < 1e-9);
}

TEST_CASE("barycenter first-order optimality") {
  std::mt19937_64 rng(97);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<SpdMatrix> mats;
    for (int i = 0; i < 8; ++i) mats.push_back(random_spd(3, rng));
    const GaussianDataset data(std::move(mats));
    const auto res = bw_barycenter(data);
    REQUIRE(res.converged);
    CHECK(barycenter_gradient_norm(res.barycenter, data) < 1e-8);
  }
}

TEST_CASE("linearized_bw examples") {
  std::mt19937_64 rng(101);
  const SpdMatrix sbar = random_spd(2, rng);
  const SpdMatrix s = random_spd(2, rng);
  CHECK(linearized_bw(sbar, s, s) < 1e-10);

  // radial isometry
  for (int rep = 0; rep < 10; ++rep) {
    const SpdMatrix t = random_spd(3, rng);
    const SpdMatrix base = random_spd(3, rng);
    CHECK(linearized_bw(base, base, t) ==
          Catch::Approx(bures_wasserstein(base, t)).margin(1e-9));
  }

  // circle family: sqrt(2) |(a - b) sin theta|
  const double a = 1.7, b = 0.9;
  const SpdMatrix cbar(std::pow((a + b) / 2, 2) * Matrix::Identity(2, 2));
  const SpdMatrix c0 = spectral_to_spd({a, b, 0.0});
  for (double theta : {0.3, 0.9, 1.4, 2.2}) {
    const SpdMatrix ct = spectral_to_spd({a, b, theta});
    CHECK(linearized_bw(cbar, c0, ct) ==
          Catch::Approx(std::sqrt(2.0) * std::abs((a - b) * std::sin(theta)))
              .margin(1e-9));
  }

  // linearization never shrinks distances around the barycenter
  for (int rep = 0; rep < 30; ++rep) {
    const SpdMatrix base = random_spd(2, rng);
    const SpdMatrix s1 = random_spd(2, rng);
    const SpdMatrix s2 = random_spd(2, rng);
    CHECK(linearized_bw(base, s1, s2) >= bures_wasserstein(s1, s2) - 1e-9);
  }
}

TEST_CASE("fit_tpca on the grid matches flat PCA") {
  const auto data = gen_grid();
  const auto res = fit_tpca(data, 2);
  REQUIRE(res.barycenter_converged);

  // directions are diagonal matrices (the flat subspace)
  for (const auto& dir : res.principal_directions) {
    CHECK(std::abs(dir(0, 1)) < 1e-8);
    CHECK(std::abs(dir(1, 0)) < 1e-8);
  }

  // flat PCA oracle in (a, b) = (sqrt Sigma_11, sqrt Sigma_22) coordinates
  const int n = data.size();
  Eigen::MatrixXd ab(n, 2);
  for (int i = 0; i < n; ++i) {
    ab(i, 0) = std::sqrt(data.matrices()[i].mat()(0, 0));
    ab(i, 1) = std::sqrt(data.matrices()[i].mat()(1, 1));
  }
  const Eigen::RowVector2d mean = ab.colwise().mean();
  const Eigen::MatrixXd centered = ab.rowwise() - mean;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(
      centered.transpose() * centered / n);
  const double flat_ratio = es.eigenvalues()(1) / es.eigenvalues().sum();
  const double tpca_ratio =
      res.eigenvalues[0] / (res.eigenvalues[0] + res.eigenvalues[1]);
  CHECK(tpca_ratio == Catch::Approx(flat_ratio).margin(1e-6));
}

TEST_CASE("fit_tpca degenerate and structural cases") {
  std::mt19937_64 rng(103);
  const SpdMatrix s = random_spd(2, rng);
  const auto res = fit_tpca(GaussianDataset({s, s}), 3);
  for (double ev : res.eigenvalues) CHECK(std::abs(ev) < 1e-12);

  // eigenvalues non-increasing, directions orthonormal in <.,.>_Sbar
  const auto circ = gen_circle(1.5, 0.8, 10);
  const auto rc = fit_tpca(circ, 3);
  const Matrix sbar = rc.barycenter.mat();
  for (size_t i = 0; i + 1 < rc.eigenvalues.size(); ++i)
    CHECK(rc.eigenvalues[i] >= rc.eigenvalues[i + 1] - 1e-12);
  for (size_t i = 0; i < rc.principal_directions.size(); ++i)
    for (size_t j = 0; j <= i; ++j) {
      const double g = (rc.principal_directions[i] * sbar *
                        rc.principal_directions[j])
                           .trace();
      CHECK(g == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-8));
    }
}

TEST_CASE("tpca scores reproduce linearized distances") {
  std::mt19937_64 rng(107);
  std::vector<SpdMatrix> mats;
  for (int i = 0; i < 7; ++i) mats.push_back(random_spd(2, rng));
  const GaussianDataset data(std::move(mats));
  const auto res = fit_tpca(data, 3);  // full symmetric dimension for d = 2
  for (int i = 0; i < data.size(); ++i)
    for (int j = 0; j < i; ++j) {
      double d2 = 0;
      for (size_t k = 0; k < res.scores[i].size(); ++k)
        d2 += std::pow(res.scores[i][k] - res.scores[j][k], 2);
      CHECK(std::sqrt(d2) ==
            Catch::Approx(linearized_bw(res.barycenter, data.matrices()[i],
                                        data.matrices()[j]))
                .margin(1e-8));
    }
}

TEST_CASE("tpca_component_as_segment") {
  const auto data = gen_grid();
  const auto res = fit_tpca(data, 2);
  const auto seg = tpca_component_as_segment(res, 0, 1e-3);
  CHECK(std::abs(seg.direction.norm() - 1.0) < 1e-10);
  CHECK(horizontal_check(seg.base, seg.direction).horizontal);

  // grid: the projected curve stays diagonal
  for (double t : {0.0, 0.3, -0.3, 0.8}) {
    const Matrix m = geodesic_eval(seg, clip_time(seg, t)).mat();
    CHECK(std::abs(m(0, 1)) < 1e-8);
  }

  // the segment projects through the barycenter at t = 0
  CHECK((geodesic_eval(seg, 0.0).mat() - res.barycenter.mat()).norm() < 1e-10);
}

TEST_CASE("distortion_ratio") {
  auto [exact_90, approx_90] = distortion_ratio(1.1, 0.9, kPi / 2);
  CHECK(exact_90 == Catch::Approx(1.0).margin(1e-12));
  CHECK(approx_90 == Catch::Approx(1.0).margin(1e-12));

  // isotropic limit through a - b = 1e-6
  auto [exact_iso, approx_iso] = distortion_ratio(1.0 + 5e-7, 1.0 - 5e-7, 1.0);
  CHECK(exact_iso == Catch::Approx(1.0).margin(1e-9));
  CHECK(approx_iso == Catch::Approx(1.0).margin(1e-9));

  CHECK_THROWS_AS(distortion_ratio(1.2, 0.8, 0.0), std::domain_error);

  // fourth-order decay of the expansion error
  for (double theta : {kPi / 6, kPi / 4, kPi / 3}) {
    auto err = [&](double gap) {
      auto [e, ap] = distortion_ratio(1.0 + gap / 2, 1.0 - gap / 2, theta);
      return std::abs(e - ap);
    };
    const double ratio = err(0.2) / err(0.1);
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 32.0);
  }
}

TEST_CASE("curvature_value") {
  const double a = 1.3, b = 0.8;
  CHECK(std::abs(curvature_value(a, b, 0.0)) < 1e-12);
  const double closed = 1.5 * std::pow(a - b, 4) / std::pow(a + b, 2);
  CHECK(curvature_value(a, b, kPi / 4) == Catch::Approx(closed).margin(1e-10));
  for (double theta : {0.4, 1.1, 2.0})
    CHECK(curvature_value(a, b, theta) ==
          Catch::Approx(closed * std::pow(std::sin(2 * theta), 2)).margin(1e-10));

  // curvature correction reproduces the expansion at next order:
  // BW^2 ~ lin^2 - R/3, so exact - approx shrinks when corrected.
  const double theta = kPi / 3;
  for (double gap : {0.2, 0.1}) {
    const double aa = 1.0 + gap / 2, bb = 1.0 - gap / 2;
    auto [exact, approx] = distortion_ratio(aa, bb, theta);
    const SpdMatrix sbar(Matrix::Identity(2, 2));
    const SpdMatrix s1 = spectral_to_spd({aa, bb, 0.0});
    const SpdMatrix s2 = spectral_to_spd({aa, bb, theta});
    const double lin2 = std::pow(linearized_bw(sbar, s1, s2), 2);
    const double corrected = (lin2 - curvature_value(aa, bb, theta) / 3.0) / lin2;
    CHECK(std::abs(exact - corrected) <
          0.5 * std::abs(exact - approx) + 1e-12);
  }
}
