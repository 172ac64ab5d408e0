#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "kernels.hpp"
#include "protocol.hpp"

namespace qmcap {

enum class InputBasis { boxcar, impulse };
enum class DetuningOrigin { centered, entrance };

struct SolverConfig {
  int n_z = 400;
  int n_t = 0;            // 0: smallest count meeting the step bound
  double t_start = 0.0;
  double t_end = 0.0;     // 0: 2 when delta0 >= 10, else 10
  InputBasis input_basis = InputBasis::boxcar;
  double cfl_safety = 0.5;
  double medium_length = 1.0;
  DetuningOrigin detuning = DetuningOrigin::centered;
};

struct Propagation {
  Eigen::VectorXcd B;        // spin wave at t_end on the z grid
  Eigen::VectorXcd A_trans;  // output field per time cell
};

// Linear two-level Maxwell-Bloch model discretized by Gauss-Legendre
// collocation in z and explicit midpoint steps in time:
//   dA/dz = -sqrt(d) P,   dP/dt = -(gamma + i Delta(z)) P + sqrt(d) A.
class MaxwellBloch {
public:
  MaxwellBloch(const ProtocolSpec& spec, SolverConfig cfg) : spec_(spec), cfg_(cfg) {
    require(spec.protocol == Protocol::lcrib_numeric,
            std::string("protocol == lcrib-numeric (got ") + to_string(spec.protocol) + ")");
    spec.validate();
    require(cfg.n_z >= 16, "solver: n_z >= 16 (got " + std::to_string(cfg.n_z) + ")");
    require(cfg.cfl_safety > 0 && cfg.cfl_safety <= 1, "solver: cfl_safety in (0,1]");
    require(cfg.medium_length > 0, "solver: medium_length > 0");
    if (cfg_.t_end == 0.0) cfg_.t_end = cfg_.t_start + (spec.delta0 >= 10 * spec.gamma ? 2.0 : 10.0) / spec.gamma;
    require(cfg_.t_end > cfg_.t_start, "solver: t_end > t_start");
    const double L = cfg_.medium_length;
    zgrid_ = gauss_legendre_grid(cfg.n_z, 0.0, L, Axis::position);

    detuning_.resize(cfg.n_z);
    for (int i = 0; i < cfg.n_z; ++i) {
      double z = zgrid_.nodes[i];
      detuning_[i] = cfg.detuning == DetuningOrigin::centered ? spec.delta0 * (z - 0.5) : spec.delta0 * z;
    }
    // full detuning spread, not its half: the midpoint rule is only weakly
    // stable on the imaginary axis
    double rate = std::max({spec.delta0 * L, spec.gamma, spec.d * spec.gamma * L});
    max_step_ = cfg.cfl_safety / rate;
    double span = cfg_.t_end - cfg_.t_start;
    if (cfg_.n_t == 0) cfg_.n_t = std::max(1, int(std::ceil(span / max_step_ * (1 - 1e-12))));
    step_ = span / cfg_.n_t;
    if (step_ > max_step_ * (1 + 1e-12))
      throw ValidationError("CFL violation: step " + std::to_string(step_) + " > " + std::to_string(max_step_));
    tgrid_ = midpoint_grid(cfg_.n_t, cfg_.t_start, cfg_.t_end, Axis::time);
    build_operator();
  }

  const Grid& zgrid() const { return zgrid_; }
  const Grid& tgrid() const { return tgrid_; }
  const SolverConfig& config() const { return cfg_; }
  double step() const { return step_; }

  // A_in holds one sample per time cell.
  Propagation propagate(const Eigen::VectorXcd& A_in) const {
    require(A_in.size() == cfg_.n_t, "propagate: A_in has one sample per time cell");
    const int n = cfg_.n_z;
    const double sd = std::sqrt(spec_.d * spec_.gamma);
    const double h = step_;
    Eigen::VectorXcd P = Eigen::VectorXcd::Zero(n), mid(n);
    Propagation out;
    out.A_trans.resize(cfg_.n_t);
    Eigen::RowVectorXd w = Eigen::Map<const Eigen::RowVectorXd>(zgrid_.weights.data(), n);
    for (int s = 0; s < cfg_.n_t; ++s) {
      cplx src = 0;
      if (cfg_.input_basis == InputBasis::boxcar) {
        src = sd * A_in[s];
      } else {
        P.array() += sd * A_in[s] * h;
      }
      mid.noalias() = op_ * P;
      mid.array() += src;
      mid = P + 0.5 * h * mid;
      out.A_trans[s] = (cfg_.input_basis == InputBasis::boxcar ? A_in[s] : cplx(0)) - sd * cplx(w * mid);
      Eigen::VectorXcd k2 = op_ * mid;
      k2.array() += src;
      P += h * k2;
      if ((s & 63) == 0 && !P.allFinite()) throw NumericalError("solver: non-finite state at step " + std::to_string(s));
    }
    if (!P.allFinite()) throw NumericalError("solver: non-finite final state");
    out.B = P;
    return out;
  }

  // Storage kernel K(z, t_j): column j is the spin wave at t_end produced by a
  // unit-area input in time cell j. The coefficients do not depend on time, so
  // one run from the first cell gives every column.
  DiscretizedKernel greens_function() const {
    const int n = cfg_.n_z, nt = cfg_.n_t;
    const double sd = std::sqrt(spec_.d * spec_.gamma);
    const double h = step_;
    Eigen::MatrixXcd hist(n, nt);
    Eigen::VectorXcd P = Eigen::VectorXcd::Zero(n), mid(n), k2(n);
    for (int s = 0; s < nt; ++s) {
      cplx src = 0;
      if (s == 0) {
        if (cfg_.input_basis == InputBasis::boxcar) src = sd / h;
        else P.array() += sd;
      }
      mid.noalias() = op_ * P;
      mid.array() += src;
      mid = P + 0.5 * h * mid;
      k2.noalias() = op_ * mid;
      k2.array() += src;
      P += h * k2;
      if ((s & 63) == 0 && !P.allFinite()) throw NumericalError("solver: non-finite state at step " + std::to_string(s));
      hist.col(s) = P;
    }
    if (!hist.allFinite()) throw NumericalError("solver: non-finite kernel");
    DiscretizedKernel K{Eigen::MatrixXcd(n, nt), zgrid_, tgrid_, KernelKind::storage, detail::tag(spec_) + " mb"};
    for (int j = 0; j < nt; ++j) K.values.col(j) = hist.col(nt - 1 - j);
    return K;
  }

private:
  void build_operator() {
    const int n = cfg_.n_z;
    const double L = cfg_.medium_length;
    // Legendre values and running integrals at the nodes (unit interval [-1,1])
    Eigen::MatrixXd V(n, n + 1), Vi(n, n);
    for (int i = 0; i < n; ++i) {
      double x = 2.0 * zgrid_.nodes[i] / L - 1.0;
      V(i, 0) = 1.0;
      V(i, 1) = x;
      for (int k = 2; k <= n; ++k) V(i, k) = ((2.0 * k - 1.0) * x * V(i, k - 1) - (k - 1.0) * V(i, k - 2)) / k;
      Vi(i, 0) = x + 1.0;
      for (int j = 1; j < n; ++j) Vi(i, j) = (V(i, j + 1) - V(i, j - 1)) / (2.0 * j + 1.0);
    }
    // coefficients from nodal values: c_j = (2j+1)/2 sum_i w_i P_j(x_i) f_i
    Eigen::MatrixXd Vinv(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) Vinv(j, i) = (2.0 * j + 1.0) / 2.0 * V(i, j) * (2.0 * zgrid_.weights[i] / L);
    Eigen::MatrixXd S = 0.5 * L * Vi * Vinv;
    op_ = (-spec_.d * spec_.gamma * S).cast<cplx>();
    for (int i = 0; i < n; ++i) op_(i, i) -= cplx(spec_.gamma, detuning_[i]);
  }

  ProtocolSpec spec_;
  SolverConfig cfg_;
  Grid zgrid_, tgrid_;
  std::vector<double> detuning_;
  double max_step_ = 0, step_ = 0;
  Eigen::MatrixXcd op_;
};

inline Propagation propagate_signal(const ProtocolSpec& spec, const Eigen::VectorXcd& A_in, const SolverConfig& cfg) {
  return MaxwellBloch(spec, cfg).propagate(A_in);
}

inline DiscretizedKernel lcrib_greens_function(const ProtocolSpec& spec, const SolverConfig& cfg = {}) {
  return MaxwellBloch(spec, cfg).greens_function();
}

// (1/sqrt(2 pi)) int K(z,t) e^{-ikz} dz by the row-grid quadrature, for
// arbitrary complex k (Im k < 0 damps large z).
inline Eigen::MatrixXcd spatial_fourier_transform(const DiscretizedKernel& K, const std::vector<cplx>& ks) {
  const cplx I(0, 1);
  Eigen::MatrixXcd F(ks.size(), K.row_grid.size());
  for (std::size_t m = 0; m < ks.size(); ++m)
    for (std::size_t i = 0; i < K.row_grid.size(); ++i)
      F(m, i) = K.row_grid.weights[i] * std::exp(-I * ks[m] * K.row_grid.nodes[i]) * detail::inv_sqrt_2pi;
  return F * K.values;
}

}  // namespace qmcap
