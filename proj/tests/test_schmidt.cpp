#include <gtest/gtest.h>

#include <qmcap/kernels.hpp>
#include <qmcap/schmidt.hpp>
#include <random>

#include "oracles.hpp"

using namespace qmcap;

namespace {

Grid unit_weights(int n, Axis a = Axis::position) {
  Grid g;
  g.axis = a;
  g.lo = 0;
  g.hi = n;
  for (int i = 0; i < n; ++i) {
    g.nodes.push_back(i + 0.5);
    g.weights.push_back(1.0);
  }
  return g;
}

// psi(z) phi*(tau) with both factors quadrature-normalized
DiscretizedKernel rank_one(const Grid& z, const Grid& t) {
  Eigen::VectorXcd psi(z.size()), phi(t.size());
  double nz = 0, nt = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    psi[i] = std::polar(std::exp(-z.nodes[i]), 3.0 * z.nodes[i]);
    nz += z.weights[i] * std::norm(psi[i]);
  }
  for (std::size_t j = 0; j < t.size(); ++j) {
    phi[j] = std::polar(1.0 + t.nodes[j] * t.nodes[j], -t.nodes[j]);
    nt += t.weights[j] * std::norm(phi[j]);
  }
  psi /= std::sqrt(nz);
  phi /= std::sqrt(nt);
  return {psi * phi.adjoint(), z, t, KernelKind::storage, "rank-one"};
}

DiscretizedKernel random_storage(std::mt19937& rng, int nr, int nc) {
  std::normal_distribution<double> nd;
  Grid z = gauss_legendre_grid(nr, 0, 1);
  Grid t = midpoint_grid(nc, -1, 1);
  Eigen::MatrixXcd V(nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) V(i, j) = cplx(nd(rng), nd(rng)) * 0.3;
  return {V, z, t, KernelKind::storage, "random"};
}

}  // namespace

TEST(WeightEmbed, UnitWeightsLeaveMatrixUnchanged) {
  Eigen::MatrixXcd V = Eigen::MatrixXcd::Random(3, 4);
  DiscretizedKernel K{V, unit_weights(3), unit_weights(4, Axis::time), KernelKind::storage, ""};
  EXPECT_EQ((weight_embed(K) - V).cwiseAbs().maxCoeff(), 0.0);
  K.values.resize(2, 2);
  EXPECT_THROW(weight_embed(K), ValidationError);
}

TEST(WeightEmbed, RankOneKernelHasUnitSingularValue) {
  auto K = rank_one(gauss_legendre_grid(30, 0, 1), midpoint_grid(50, -1, 1));
  auto s = singular_spectrum(K);
  EXPECT_NEAR(s.values[0], 1.0, 1e-10);
  EXPECT_TRUE(s.values.size() == 1 || s.values[1] < 1e-9);
}

TEST(WeightEmbed, TraceMatchesDiagonalQuadrature) {
  Grid z = gauss_legendre_grid(200, 0, 1);
  auto K = unbroadened_antinormal_kernel(unbroadened_spec(10), z);
  cplx tr = weight_embed(K).trace();
  double q = 0;
  for (std::size_t i = 0; i < z.size(); ++i)
    q += z.weights[i] * 5.0 * double(std::exp(-10.0L * z.nodes[i]) * oracle::bessel_i0_series(10.0L * z.nodes[i]));
  EXPECT_NEAR(tr.real(), q, 1e-10);
}

TEST(SingularSpectrum, TrivialMatrices) {
  DiscretizedKernel Z{Eigen::MatrixXcd::Zero(3, 3), unit_weights(3), unit_weights(3), KernelKind::storage, ""};
  auto s = singular_spectrum(Z);
  for (double v : s.values) EXPECT_EQ(v, 0.0);
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(2, 2);
  D(0, 0) = 0.4;
  D(1, 1) = 0.9;
  auto s2 = singular_spectrum({D, unit_weights(2), unit_weights(2), KernelKind::storage, ""});
  ASSERT_EQ(s2.values.size(), 2u);
  EXPECT_NEAR(s2.values[0], 0.9, 1e-15);
  EXPECT_NEAR(s2.values[1], 0.4, 1e-15);
  EXPECT_TRUE(s2.warnings.empty());
}

TEST(SingularSpectrum, OvershootRaisesWarning) {
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Identity(2, 2) * 1.2;
  auto s = singular_spectrum({D, unit_weights(2), unit_weights(2), KernelKind::storage, ""});
  EXPECT_FALSE(s.warnings.empty());
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Constant(2, 2, cplx(NAN, 0));
  EXPECT_THROW(singular_spectrum({B, unit_weights(2), unit_weights(2), KernelKind::storage, ""}), ValidationError);
}

TEST(SingularSpectrum, TruncatesBelowRelativeFloor) {
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(3, 3);
  D(0, 0) = 1;
  D(1, 1) = 1e-8;
  D(2, 2) = 1e-11;
  auto s = singular_spectrum({D, unit_weights(3), unit_weights(3), KernelKind::storage, ""});
  EXPECT_EQ(s.values.size(), 2u);
}

TEST(UnbroadenedSpectrum, EigenvalueSumEqualsTrace) {
  Grid z = gauss_legendre_grid(400, 0, 1);
  auto K = unbroadened_antinormal_kernel(unbroadened_spec(100), z);
  auto s = hermitian_eigen_spectrum(K);
  double sum = 0;
  for (double v : s.values) sum += v;
  double q = 0;
  for (std::size_t i = 0; i < z.size(); ++i)
    q += z.weights[i] * 50.0 * double(std::exp(-100.0L * z.nodes[i]) * oracle::bessel_i0_series(100.0L * z.nodes[i]));
  EXPECT_NEAR(sum, q, 1e-8 * q);
}

TEST(UnbroadenedSpectrum, WeakCouplingIsInefficient) {
  auto s1 = hermitian_eigen_spectrum(unbroadened_antinormal_kernel(unbroadened_spec(1), gauss_legendre_grid(100, 0, 1)));
  auto s2 = hermitian_eigen_spectrum(unbroadened_antinormal_kernel(unbroadened_spec(1), gauss_legendre_grid(200, 0, 1)));
  EXPECT_LT(s1.values[0], 0.4);
  EXPECT_NEAR(s1.values[0], s2.values[0], 1e-12);
}

TEST(Products, RankOneProjector) {
  auto K = rank_one(gauss_legendre_grid(20, 0, 1), midpoint_grid(30, -1, 1));
  for (auto P : {normal_product(K), antinormal_product(K)}) {
    EXPECT_NO_THROW(P.validate());
    auto s = hermitian_eigen_spectrum(P);
    EXPECT_NEAR(s.values[0], 1.0, 1e-10);
    EXPECT_TRUE(s.values.size() == 1 || s.values[1] < 1e-9);
  }
}

TEST(Products, WrongKindRejected) {
  auto K = tcrib_total_kernel(tcrib_spec(10, 10), uniform_grid(11, -5, 5, Axis::frequency));
  EXPECT_THROW(normal_product(K), ValidationError);
  EXPECT_THROW(antinormal_product(K), ValidationError);
}

TEST(Products, EigenvaluesEqualSquaredSingularValuesOnRandomKernels) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    auto K = random_storage(rng, 40 + 5 * trial, 55);
    auto sv = singular_spectrum(K);
    auto en = hermitian_eigen_spectrum(normal_product(K));
    auto ea = hermitian_eigen_spectrum(antinormal_product(K));
    for (int k = 0; k < 20; ++k) {
      double s2 = sv.values[k] * sv.values[k];
      EXPECT_NEAR(en.values[k] / s2, 1.0, 1e-8);
      EXPECT_NEAR(ea.values[k] / s2, 1.0, 1e-8);
    }
    EXPECT_LT(antinormal_product(K).hermitian_defect(), 1e-10);
  }
}

TEST(HermitianEigen, DiagonalAndRejection) {
  auto s = hermitian_eigen_spectrum({Eigen::MatrixXcd::Identity(2, 2), unit_weights(2), unit_weights(2),
                                     KernelKind::product, ""});
  EXPECT_EQ(s.values, (std::vector<double>{1.0, 1.0}));
  Eigen::MatrixXcd A(2, 2);
  A << 1, 0.5, 0.1, 1;
  EXPECT_THROW(hermitian_eigen_spectrum({A, unit_weights(2), unit_weights(2), KernelKind::product, ""}),
               ValidationError);
}

TEST(HermitianEigen, NegativeEigenvaluesClampWithWarning) {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2, 2);
  A(0, 0) = 0.5;
  A(1, 1) = -1e-3;
  auto s = hermitian_eigen_spectrum({A, unit_weights(2), unit_weights(2), KernelKind::product, ""});
  EXPECT_EQ(s.values.size(), 1u);
  EXPECT_FALSE(s.warnings.empty());
}

TEST(Capacity, ThresholdArithmetic) {
  SingularSpectrum s;
  s.kind = KernelKind::total;
  for (double e : {0.9, 0.8, 0.5}) s.values.push_back(std::sqrt(e));
  auto c = capacity(s, 0.7);
  EXPECT_NEAR(c.lambda_bar[0], 0.9, 1e-15);
  EXPECT_NEAR(c.lambda_bar[1], 0.85, 1e-15);
  EXPECT_NEAR(c.lambda_bar[2], 2.2 / 3, 1e-15);
  EXPECT_EQ(c.N, 3);
  SingularSpectrum one;
  one.kind = KernelKind::total;
  one.values = {std::sqrt(0.6)};
  EXPECT_EQ(capacity(one, 0.7).N, 0);
  EXPECT_EQ(capacity(SingularSpectrum{}, 0.7).N, 0);
  EXPECT_THROW(capacity(s, 1.0), ValidationError);
  EXPECT_THROW(capacity(s, 0.0), ValidationError);
}

TEST(Capacity, EfficiencyByKind) {
  EXPECT_DOUBLE_EQ(efficiency(0.9, KernelKind::storage), std::pow(0.9, 4));
  EXPECT_DOUBLE_EQ(efficiency(0.9, KernelKind::total), 0.81);
  EXPECT_DOUBLE_EQ(efficiency(0.9, KernelKind::product), 0.81);
}

TEST(Capacity, StrictThreshold) {
  SingularSpectrum s;
  s.kind = KernelKind::product;
  s.values = {std::sqrt(0.75), std::sqrt(0.65)};
  EXPECT_EQ(capacity(s, 0.7).N, 1);
}

TEST(Capacity, NineHundredDepthUnbroadened) {
  auto s = hermitian_eigen_spectrum(unbroadened_antinormal_kernel(unbroadened_spec(900), gauss_legendre_grid(400, 0, 1)));
  int N = capacity(s, 0.7).N;
  EXPECT_GE(N, 8);
  EXPECT_LE(N, 12);
}

TEST(Capacity, MonotoneInThresholdAndScale) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    SingularSpectrum s;
    s.kind = trial % 2 ? KernelKind::storage : KernelKind::total;
    for (int k = 0; k < 15; ++k) s.values.push_back(u(rng));
    std::sort(s.values.rbegin(), s.values.rend());
    double t1 = 0.01 + 0.98 * u(rng), t2 = 0.01 + 0.98 * u(rng);
    if (t1 > t2) std::swap(t1, t2);
    EXPECT_GE(capacity(s, t1).N, capacity(s, t2).N);
    SingularSpectrum scaled = s;
    double scale = 0.05 + 0.9 * u(rng);
    for (double& v : scaled.values) v *= scale;
    EXPECT_LE(capacity(scaled, t1).N, capacity(s, t1).N);
    const auto c = capacity(s, t1);
    for (std::size_t k = 1; k < c.lambda_bar.size(); ++k) EXPECT_LE(c.lambda_bar[k], c.lambda_bar[k - 1] + 1e-15);
  }
}

TEST(FourierConjugate, RoundTripRestoresMatrix) {
  std::mt19937 rng(3);
  Grid z = midpoint_grid(33, 0, 1, Axis::position);
  Grid t = midpoint_grid(48, -1, 1, Axis::time);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd V(33, 48);
  for (int i = 0; i < 33; ++i)
    for (int j = 0; j < 48; ++j) V(i, j) = cplx(nd(rng), nd(rng));
  DiscretizedKernel K{V, z, t, KernelKind::storage, ""};
  for (auto axis : {KernelAxis::row, KernelAxis::col}) {
    double centre = axis == KernelAxis::row ? z.nodes[33 / 2] : t.nodes[48 / 2];
    auto F = fourier_conjugate(K, axis, -1);
    auto B = fourier_conjugate(F, axis, +1, centre);
    EXPECT_LT((B.values - V).cwiseAbs().maxCoeff(), 1e-12);
    const Grid& g = axis == KernelAxis::row ? B.row_grid : B.col_grid;
    const Grid& g0 = axis == KernelAxis::row ? z : t;
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g.nodes[i], g0.nodes[i], 1e-12);
  }
}

TEST(FourierConjugate, PreservesSingularValues) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    auto K = random_storage(rng, 20, 40);
    K.col_grid = uniform_grid(40, -1, 1, Axis::time);  // trapezoid weights are fine too
    auto s0 = singular_spectrum(K);
    auto s1 = singular_spectrum(fourier_conjugate(K, KernelAxis::col));
    for (std::size_t k = 0; k < s0.values.size(); ++k) EXPECT_NEAR(s1.values[k], s0.values[k], 1e-10);
  }
}

TEST(FourierConjugate, ContinuousTransformOfGaussian) {
  // exp(-t^2/2) maps to exp(-w^2/2) (unit-normalized transform)
  Grid t = midpoint_grid(128, -16, 16, Axis::time);
  Grid one = unit_weights(1);
  Eigen::MatrixXcd V(1, 128);
  for (int j = 0; j < 128; ++j) V(0, j) = std::exp(-0.5 * t.nodes[j] * t.nodes[j]);
  auto F = fourier_conjugate({V, one, t, KernelKind::storage, ""}, KernelAxis::col);
  EXPECT_EQ(F.col_grid.axis, Axis::frequency);
  for (std::size_t m = 0; m < F.col_grid.size(); ++m) {
    double w = F.col_grid.nodes[m];
    // phase relative to the centre node t_c = t.nodes[64]
    cplx ref = std::exp(-0.5 * w * w) * std::polar(1.0, w * t.nodes[64]);
    EXPECT_NEAR(std::abs(F.values(0, m) - ref), 0, 1e-10);
  }
}

TEST(FourierConjugate, RejectsNonUniformGrid) {
  auto K = rank_one(gauss_legendre_grid(10, 0, 1), midpoint_grid(12, -1, 1));
  EXPECT_THROW(fourier_conjugate(K, KernelAxis::row), ValidationError);
  EXPECT_NO_THROW(fourier_conjugate(K, KernelAxis::col));
}
