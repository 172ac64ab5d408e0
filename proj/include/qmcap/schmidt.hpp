#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "kernel.hpp"

namespace qmcap {

struct SingularSpectrum {
  std::vector<double> values;  // descending, >= 0
  KernelKind kind = KernelKind::storage;
  std::vector<std::size_t> resolution;  // row and column grid sizes
  std::vector<std::string> warnings;
};

struct CapacityResult {
  std::vector<double> efficiencies;
  std::vector<double> lambda_bar;
  double theta = 0.7;
  int N = 0;

  // Running average of the mode after the last counted one, 0 if absent.
  double next_lambda() const { return std::size_t(N) < lambda_bar.size() ? lambda_bar[N] : 0.0; }
};

inline Eigen::MatrixXcd weight_embed(const DiscretizedKernel& K) {
  require(K.values.rows() == Eigen::Index(K.row_grid.size()) && K.values.cols() == Eigen::Index(K.col_grid.size()),
          "weight_embed: dimension mismatch");
  Eigen::VectorXd wr(K.row_grid.size()), wc(K.col_grid.size());
  for (std::size_t i = 0; i < K.row_grid.size(); ++i) {
    require(K.row_grid.weights[i] > 0, "weight_embed: weights > 0");
    wr[i] = std::sqrt(K.row_grid.weights[i]);
  }
  for (std::size_t j = 0; j < K.col_grid.size(); ++j) {
    require(K.col_grid.weights[j] > 0, "weight_embed: weights > 0");
    wc[j] = std::sqrt(K.col_grid.weights[j]);
  }
  return wr.asDiagonal() * K.values * wc.asDiagonal();
}

namespace detail {

inline void finish_spectrum(SingularSpectrum& s, double lead_bound) {
  std::sort(s.values.begin(), s.values.end(), std::greater<>());
  if (!s.values.empty() && s.values.front() > 0) {
    double cut = 1e-9 * s.values.front();
    while (!s.values.empty() && s.values.back() < cut) s.values.pop_back();
  }
  if (!s.values.empty() && s.values.front() > lead_bound)
    s.warnings.push_back("leading value " + std::to_string(s.values.front()) + " exceeds 1.01: refine grids");
}

}  // namespace detail

inline SingularSpectrum singular_spectrum(const DiscretizedKernel& K) {
  require(K.all_finite(), "singular_spectrum: kernel entries finite");
  Eigen::MatrixXcd M = weight_embed(K);
  SingularSpectrum s;
  s.kind = K.kind;
  s.resolution = {K.row_grid.size(), K.col_grid.size()};
  if (M.size() == 0) return s;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("singular_spectrum: decomposition failed (" + std::to_string(M.rows()) + "x" +
                         std::to_string(M.cols()) + ", max|M|=" + std::to_string(M.cwiseAbs().maxCoeff()) + ")");
  }
  const auto& sv = svd.singularValues();
  s.values.assign(sv.data(), sv.data() + sv.size());
  if (s.values.empty() || s.values.front() == 0) {
    s.values.assign(sv.size(), 0.0);
    return s;
  }
  detail::finish_spectrum(s, 1.01);
  return s;
}

// K_N(tau,tau') = int K*(z,tau) K(z,tau') dz
inline DiscretizedKernel normal_product(const DiscretizedKernel& K) {
  require(K.kind == KernelKind::storage, "normal_product: storage kernel required");
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(K.row_grid.weights.data(), K.row_grid.size());
  Eigen::MatrixXcd P = K.values.adjoint() * w.asDiagonal() * K.values;
  P = 0.5 * (P + P.adjoint()).eval();
  return {P, K.col_grid, K.col_grid, KernelKind::product, K.provenance + " normal"};
}

// K_A(z,z') = int K(z,tau) K*(z',tau) dtau
inline DiscretizedKernel antinormal_product(const DiscretizedKernel& K) {
  require(K.kind == KernelKind::storage, "antinormal_product: storage kernel required");
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(K.col_grid.weights.data(), K.col_grid.size());
  Eigen::MatrixXcd P = K.values * w.asDiagonal() * K.values.adjoint();
  P = 0.5 * (P + P.adjoint()).eval();
  return {P, K.row_grid, K.row_grid, KernelKind::product, K.provenance + " antinormal"};
}

inline SingularSpectrum hermitian_eigen_spectrum(const DiscretizedKernel& K) {
  require(K.values.rows() == K.values.cols() && K.row_grid == K.col_grid, "hermitian_eigen_spectrum: square kernel");
  require(K.all_finite(), "hermitian_eigen_spectrum: kernel entries finite");
  double defect = K.hermitian_defect();
  require(defect <= 1e-10, "hermitian_eigen_spectrum: Hermitian within 1e-10 (defect " + std::to_string(defect) + ")");
  Eigen::MatrixXcd M = weight_embed(K);
  SingularSpectrum s;
  s.kind = KernelKind::product;
  s.resolution = {K.row_grid.size(), K.col_grid.size()};
  if (M.size() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_eigen_spectrum: eigensolver did not converge");
  const auto& ev = es.eigenvalues();
  double most_negative = 0;
  double top = ev.size() ? std::max(ev.maxCoeff(), 0.0) : 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    most_negative = std::min(most_negative, ev[i]);
    s.values.push_back(std::max(ev[i], 0.0));
  }
  if (most_negative < -1e-10 * std::max(1.0, top))
    s.warnings.push_back("negative eigenvalue " + std::to_string(most_negative) + " clamped: refine grids");
  if (top == 0) return s;
  detail::finish_spectrum(s, 1.01);
  return s;
}

inline double efficiency(double value, KernelKind kind) {
  double e = value * value;
  return kind == KernelKind::storage ? e * e : e;
}

inline CapacityResult capacity(const SingularSpectrum& s, double theta = 0.7) {
  require(theta > 0 && theta < 1, "theta in (0,1) (got " + std::to_string(theta) + ")");
  CapacityResult r;
  r.theta = theta;
  double sum = 0;
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    double e = efficiency(s.values[k], s.kind);
    r.efficiencies.push_back(e);
    sum += e;
    r.lambda_bar.push_back(sum / double(k + 1));
  }
  for (double L : r.lambda_bar)
    if (L > theta) ++r.N;
  return r;
}

enum class KernelAxis { row, col };

// Unitary DFT along one axis of a uniformly spaced grid. Phases are taken
// relative to the centre node index n/2 of both grids; the new grid is
// centred on `center` (0 for k or omega). sign = -1 forward, +1 inverse.
inline DiscretizedKernel fourier_conjugate(const DiscretizedKernel& K, KernelAxis axis, int sign = -1,
                                           double center = 0.0) {
  const Grid& g = axis == KernelAxis::row ? K.row_grid : K.col_grid;
  require(g.is_uniform(), "fourier_conjugate: uniform grid on the chosen axis");
  require(sign == 1 || sign == -1, "fourier_conjugate: sign is +1 or -1");
  const int n = int(g.size());
  const int c = n / 2;
  const double h = g.spacing();
  const double dk = 2.0 * std::numbers::pi / (n * h);
  Eigen::MatrixXcd U(n, n);
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j) {
      long long p = (long long)(m - c) * (j - c) % n;
      double ang = sign * 2.0 * std::numbers::pi * double(p) / n;
      U(m, j) = std::polar(1.0 / std::sqrt(double(n)), ang);
    }
  Eigen::VectorXd sw(n);
  for (int j = 0; j < n; ++j) sw[j] = std::sqrt(g.weights[j]);

  Grid out;
  out.axis = g.axis == Axis::position ? Axis::spatial_frequency
             : g.axis == Axis::time ? Axis::frequency
             : g.axis == Axis::frequency ? Axis::time
                                          : Axis::position;
  out.nodes.resize(n);
  out.weights.assign(n, dk);
  for (int m = 0; m < n; ++m) out.nodes[m] = center + (m - c) * dk;
  out.lo = out.nodes.front() - 0.5 * dk;
  out.hi = out.nodes.back() + 0.5 * dk;
  const double sdk = std::sqrt(dk);

  DiscretizedKernel R;
  R.kind = K.kind;
  R.provenance = K.provenance + " fourier";
  if (axis == KernelAxis::row) {
    R.values = (U * (sw.asDiagonal() * K.values)) / sdk;
    R.row_grid = out;
    R.col_grid = K.col_grid;
  } else {
    R.values = ((K.values * sw.asDiagonal()) * U.transpose()) / sdk;
    R.row_grid = K.row_grid;
    R.col_grid = out;
  }
  return R;
}

}  // namespace qmcap
