#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "lineshape.hpp"
#include "protocol.hpp"
#include "special.hpp"

namespace qmcap {

namespace detail {

inline std::string tag(const ProtocolSpec& s) {
  std::ostringstream o;
  o.precision(12);
  o << to_string(s.protocol) << " d=" << s.d << " delta0=" << s.delta0;
  if (s.protocol == Protocol::afc) o << " M=" << s.M;
  if (s.protocol == Protocol::raman) o << " delta=" << s.delta;
  return o.str();
}

inline void expect(const ProtocolSpec& s, Protocol p) {
  require(s.protocol == p, std::string("protocol == ") + to_string(p) + " (got " + to_string(s.protocol) + ")");
  s.validate();
}

constexpr double inv_sqrt_2pi = 0.39894228040143267794;

}  // namespace detail

// Absorption-only storage followed by time-reversed retrieval; anti-normal product.
inline DiscretizedKernel unbroadened_antinormal_kernel(const ProtocolSpec& spec, const Grid& zgrid) {
  detail::expect(spec, Protocol::unbroadened);
  zgrid.validate();
  for (double z : zgrid.nodes) require(z >= 0.0 && z <= 1.0, "unbroadened kernel: z nodes within [0,1]");
  const double d = spec.d;
  const std::size_t n = zgrid.size();
  DiscretizedKernel K{Eigen::MatrixXcd(n, n), zgrid, zgrid, KernelKind::product, detail::tag(spec)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double zi = zgrid.nodes[i], zj = zgrid.nodes[j];
      double x = d * std::sqrt(zi * zj);
      double r = std::sqrt(zi) - std::sqrt(zj);
      double v = 0.5 * d * std::exp(-0.5 * d * r * r) * scaled_bessel_i0(x);
      K.values(i, j) = K.values(j, i) = v;
    }
  }
  return K;
}

// Transverse CRIB total kernel on a frequency grid (d = total depth).
inline DiscretizedKernel tcrib_total_kernel(const ProtocolSpec& spec, const Grid& wgrid) {
  detail::expect(spec, Protocol::tcrib);
  const std::size_t n = wgrid.size();
  const cplx I(0, 1);
  std::vector<cplx> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = rect_lineshape(wgrid.nodes[i], spec.gamma, spec.delta0);
  DiscretizedKernel K{Eigen::MatrixXcd(n, n), wgrid, wgrid, KernelKind::total, detail::tag(spec)};
  const double c = 0.5 / std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      cplx v = c * expm1(-spec.d * (f[i] + f[j])) / (2.0 * spec.gamma + I * (wgrid.nodes[i] + wgrid.nodes[j]));
      K.values(i, j) = K.values(j, i) = v;
    }
  }
  return K;
}

// Atomic frequency comb total kernel (d = per-tooth depth).
inline DiscretizedKernel afc_total_kernel(const ProtocolSpec& spec, const Grid& wgrid) {
  detail::expect(spec, Protocol::afc);
  Comb comb(spec.gamma, spec.M, spec.delta0);
  const std::size_t n = wgrid.size();
  std::vector<cplx> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = comb(wgrid.nodes[i]);
  DiscretizedKernel K{Eigen::MatrixXcd(n, n), wgrid, wgrid, KernelKind::total, detail::tag(spec)};
  const double c = 0.5 / std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      cplx s = f[i] + f[j];
      cplx v = c * comb.divided_difference(wgrid.nodes[i], wgrid.nodes[j]) * expm1(-spec.d * s) / s;
      K.values(i, j) = K.values(j, i) = v;
    }
  }
  return K;
}

// ---- off-resonant Raman -------------------------------------------------

// Control-pulse helpers for the Raman kernel.
struct RamanPulse {
  ControlPulse omega;
  double cut_lo = 0, cut_hi = 0;

  explicit RamanPulse(const ControlPulse& c) : omega(c) {
    double u = std::sqrt(0.5 * std::log(1e12));
    cut_lo = c.center - c.width * u;
    cut_hi = c.center + c.width * u;
  }

  double intensity(double t) const { return omega(t) * omega(t); }

  cplx intensity(cplx t) const {
    cplx u = (t - omega.center) / omega.width;
    return omega.amplitude * omega.amplitude * std::exp(-2.0 * u * u);
  }

  // Integral of |Omega|^2 from t to infinity.
  double energy_after(double t) const {
    double a = omega.amplitude;
    return a * a * omega.width * std::sqrt(std::numbers::pi / 8.0) *
           std::erfc(std::sqrt(2.0) * (t - omega.center) / omega.width);
  }

  // Same, truncated at the upper cut.
  double energy_truncated(double t) const {
    return t >= cut_hi ? 0.0 : energy_after(t) - energy_after(cut_hi);
  }
};

namespace detail {

inline const std::vector<double>& gl12_nodes() {
  static const std::vector<double> x = [] {
    std::vector<double> xx, ww;
    gauss_legendre_unit(12, xx, ww);
    return xx;
  }();
  return x;
}

inline const std::vector<double>& gl12_weights() {
  static const std::vector<double> w = [] {
    std::vector<double> xx, ww;
    gauss_legendre_unit(12, xx, ww);
    return ww;
  }();
  return w;
}

// Integral over [a,b] of |Omega(t)|^2 / (t - tp).
inline cplx pole_segment(const RamanPulse& p, double a, double b, cplx tp) {
  const auto& x = gl12_nodes();
  const auto& w = gl12_weights();
  double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double dist = std::abs(tp.imag());
  if (tp.real() < a) dist = std::abs(tp - a);
  else if (tp.real() > b) dist = std::abs(tp - b);
  cplx sum = 0;
  if (dist > 2.0 * half) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      double t = mid + half * x[i];
      sum += w[i] * p.intensity(t) / (t - tp);
    }
    return half * sum;
  }
  cplx fp = p.intensity(tp);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double t = mid + half * x[i];
    sum += w[i] * (p.intensity(t) - fp) / (t - tp);
  }
  return half * sum + fp * std::log((b - tp) / (a - tp));
}

}  // namespace detail

// Coupling g(k,tau) = 1/(d + i Gamma (k + delta0 tau)).
inline cplx raman_g(const ProtocolSpec& spec, cplx k, double tau) {
  const cplx I(0, 1);
  cplx Gamma(spec.gamma, spec.delta);
  return 1.0 / (spec.d * spec.gamma + I * Gamma * (k + spec.delta0 * tau));
}

// Exponent integral J(k,tau) = int_tau^cut |Omega|^2 [1 - d g(k,tau')] dtau' at
// every node of an ascending list of times; the kernel carries exp(-J/Gamma).
inline std::vector<cplx> raman_exponent(const ProtocolSpec& spec, cplx k, const std::vector<double>& taus) {
  RamanPulse p(*spec.control);
  const cplx I(0, 1);
  cplx Gamma(spec.gamma, spec.delta);
  const double d = spec.d * spec.gamma;
  const std::size_t n = taus.size();
  std::vector<cplx> J(n, 0.0);
  // breakpoints: the nodes clipped to [cut_lo, cut_hi], refined to width/8
  const double hmax = p.omega.width / 8.0;
  auto coupled = [&](double a, double b) -> cplx {
    if (b <= a) return 0.0;
    if (spec.delta0 == 0) return d * raman_g(spec, k, 0.0) * (p.energy_after(a) - p.energy_after(b));
    cplx c = I * Gamma * spec.delta0;
    cplx tp = -(d / (I * Gamma) + k) / spec.delta0;
    int m = std::max(1, int(std::ceil((b - a) / hmax)));
    double h = (b - a) / m;
    cplx s = 0;
    for (int i = 0; i < m; ++i) s += detail::pole_segment(p, a + i * h, (i == m - 1) ? b : a + (i + 1) * h, tp);
    return d * s / c;
  };
  cplx acc = 0;  // coupled part from taus[i] to cut_hi
  double upper = p.cut_hi;
  for (std::size_t ii = n; ii-- > 0;) {
    double t = taus[ii];
    if (ii + 1 < n) require(taus[ii + 1] > t, "raman exponent: times ascending");
    if (t >= p.cut_hi) {
      J[ii] = 0.0;
      continue;
    }
    double a = std::max(t, p.cut_lo);
    if (a < upper) {
      acc += coupled(a, upper);
      upper = a;
    }
    J[ii] = p.energy_truncated(t) - acc;
  }
  return J;
}

// Samples of the broadened Raman storage kernel in (k, tau).
inline std::vector<cplx> raman_kernel_column(const ProtocolSpec& spec, cplx k, const std::vector<double>& taus) {
  RamanPulse p(*spec.control);
  cplx Gamma(spec.gamma, spec.delta);
  auto J = raman_exponent(spec, k, taus);
  const double pre = std::sqrt(spec.d * spec.gamma) * detail::inv_sqrt_2pi;
  std::vector<cplx> out(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i)
    out[i] = pre * std::conj(cplx(p.omega(taus[i]))) * raman_g(spec, k, taus[i]) * std::exp(-J[i] / Gamma);
  return out;
}

inline DiscretizedKernel raman_storage_kernel(const ProtocolSpec& spec, const Grid& kgrid, const Grid& tgrid) {
  detail::expect(spec, Protocol::raman);
  DiscretizedKernel K{Eigen::MatrixXcd(kgrid.size(), tgrid.size()), kgrid, tgrid, KernelKind::storage,
                      detail::tag(spec)};
  for (std::size_t i = 0; i < kgrid.size(); ++i) {
    auto col = raman_kernel_column(spec, kgrid.nodes[i], tgrid.nodes);
    for (std::size_t j = 0; j < tgrid.size(); ++j) K.values(i, j) = col[j];
  }
  return K;
}

struct RamanMediumOptions {
  double contour_shift = 3.0;  // Im k = -contour_shift
  double dk = 0.5;
  double half_width = 0.0;     // 0 selects max(200, delta0/2 + 150)
};

// Storage kernel on the physical medium z in [0,1]: the inverse spatial
// Fourier transform of the Raman kernel taken along Im k = -c. The 1/(k-k0)
// part is inverted in closed form, the smooth remainder by the trapezoid rule.
inline DiscretizedKernel raman_medium_kernel(const ProtocolSpec& spec, const Grid& zgrid, const Grid& tgrid,
                                             RamanMediumOptions opt = {}) {
  detail::expect(spec, Protocol::raman);
  zgrid.validate();
  tgrid.validate();
  require(opt.contour_shift > 0 && opt.dk > 0, "raman contour: shift > 0 and dk > 0");
  const cplx I(0, 1);
  RamanPulse p(*spec.control);
  cplx Gamma(spec.gamma, spec.delta);
  const double d = spec.d * spec.gamma;
  double X = opt.half_width > 0 ? opt.half_width : std::max(200.0, 0.5 * spec.delta0 + 150.0);
  int nk = 2 * int(std::ceil(X / opt.dk)) + 1;
  std::vector<cplx> ks(nk);
  for (int m = 0; m < nk; ++m) ks[m] = cplx(-X + m * opt.dk, -opt.contour_shift);

  // active columns: inside the pulse support
  std::vector<int> cols;
  std::vector<double> taus;
  for (std::size_t j = 0; j < tgrid.size(); ++j)
    if (tgrid.nodes[j] > p.cut_lo && tgrid.nodes[j] < p.cut_hi) {
      cols.push_back(int(j));
      taus.push_back(tgrid.nodes[j]);
    }

  const std::size_t nt = taus.size();
  const double pre = std::sqrt(d) * detail::inv_sqrt_2pi;
  Eigen::MatrixXcd R(nk, nt);
  std::vector<cplx> Em(nt);
  for (std::size_t j = 0; j < nt; ++j) Em[j] = p.energy_truncated(taus[j]);
  for (int m = 0; m < nk; ++m) {
    auto J = raman_exponent(spec, ks[m], taus);
    for (std::size_t j = 0; j < nt; ++j) {
      cplx s = pre * p.omega(taus[j]) * raman_g(spec, ks[m], taus[j]);
      R(m, j) = s * (std::exp(-J[j] / Gamma) - std::exp(-Em[j] / Gamma));
    }
  }
  const std::size_t nz = zgrid.size();
  Eigen::MatrixXcd F(nz, nk);
  for (std::size_t i = 0; i < nz; ++i)
    for (int m = 0; m < nk; ++m) F(i, m) = std::exp(I * ks[m] * zgrid.nodes[i]) * (opt.dk * detail::inv_sqrt_2pi);
  Eigen::MatrixXcd B = F * R;
  for (std::size_t j = 0; j < nt; ++j) {
    cplx k0 = -spec.delta0 * taus[j] + I * d / Gamma;
    cplx amp = std::sqrt(d) * p.omega(taus[j]) * std::exp(-Em[j] / Gamma) / Gamma;
    for (std::size_t i = 0; i < nz; ++i) B(i, j) += amp * std::exp(I * k0 * zgrid.nodes[i]);
  }
  DiscretizedKernel K{Eigen::MatrixXcd::Zero(nz, tgrid.size()), zgrid, tgrid, KernelKind::storage,
                      detail::tag(spec) + " medium"};
  for (std::size_t j = 0; j < nt; ++j) K.values.col(cols[j]) = B.col(j);
  if (!K.all_finite()) throw NumericalError("raman kernel: non-finite entries");
  return K;
}

// ---- longitudinal CRIB, closed form ------------------------------------

// Closed-form lCRIB kernel at a single point. Real k is taken as the
// boundary value from Im k < 0, where the transform is analytic.
inline cplx lcrib_analytic_value(const ProtocolSpec& spec, cplx k, double tau) {
  const cplx I(0, 1);
  require(spec.delta0 > 0, "lcrib-analytic: delta0 > 0");
  double beta = spec.d * spec.gamma / spec.delta0;
  auto lg = [](cplx z) {
    if (z.imag() == 0.0 && z.real() < 0) return cplx(std::log(-z.real()), -std::numbers::pi);
    return std::log(z);
  };
  cplx q = k + spec.delta0 * tau;
  return std::sqrt(spec.d * spec.gamma) * detail::inv_sqrt_2pi * std::exp(-spec.gamma * tau) *
         std::exp(-I * beta * lg(k)) * std::exp((I * beta - 1.0) * lg(q));
}

inline DiscretizedKernel lcrib_analytic_kernel(const ProtocolSpec& spec, const Grid& kgrid, const Grid& tgrid,
                                               double exclusion = -1.0) {
  detail::expect(spec, Protocol::lcrib_analytic);
  require(spec.delta0 > 0, "lcrib-analytic: delta0 > 0");
  double eps = exclusion >= 0 ? exclusion : 0.05 * spec.delta0 / spec.gamma;
  DiscretizedKernel K{Eigen::MatrixXcd(kgrid.size(), tgrid.size()), kgrid, tgrid, KernelKind::storage,
                      detail::tag(spec)};
  for (std::size_t j = 0; j < tgrid.size(); ++j) {
    double tau = tgrid.nodes[j];
    require(tau >= 0, "lcrib-analytic: tau >= 0");
    for (std::size_t i = 0; i < kgrid.size(); ++i) {
      double k = kgrid.nodes[i];
      if (k == 0.0 || std::abs(k + spec.delta0 * tau) <= eps) throw SingularLocusError(k, tau);
      K.values(i, j) = lcrib_analytic_value(spec, k, tau);
    }
  }
  return K;
}

}  // namespace qmcap
