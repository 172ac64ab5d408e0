#pragma once

#include <complex>
#include <vector>

#include "errors.hpp"
#include "special.hpp"

namespace qmcap {

// Rectangular inhomogeneous profile of full width delta0.
inline cplx rect_lineshape(double omega, double gamma, double delta0) {
  require(gamma > 0, "gamma > 0");
  require(delta0 >= 0, "delta0 >= 0");
  const cplx I(0, 1);
  if (delta0 == 0) return gamma / (gamma + I * omega);
  cplx u = I * delta0 / (gamma + I * (omega - 0.5 * delta0));
  return gamma / (I * delta0) * log1p(u);
}

struct Comb {
  double gamma = 1.0;
  std::vector<double> teeth;

  Comb(double gamma, int M, double delta0) : gamma(gamma) {
    require(gamma > 0, "gamma > 0");
    require(M >= 1, "M >= 1 (got " + std::to_string(M) + ")");
    require(M == 1 || delta0 > 0, "delta0 > 0 when M >= 2");
    if (M == 1) {
      teeth = {0.0};
    } else {
      teeth.resize(M);
      for (int j = 0; j < M; ++j) teeth[j] = -0.5 * delta0 + j * delta0 / (M - 1);
    }
  }

  cplx operator()(double omega) const {
    const cplx I(0, 1);
    cplx f = 0;
    for (double t : teeth) f += gamma / (gamma + I * (t + omega));
    return f;
  }

  cplx derivative(double omega) const {
    const cplx I(0, 1);
    cplx f = 0;
    for (double t : teeth) {
      cplx den = gamma + I * (t + omega);
      f -= I * gamma / (den * den);
    }
    return f;
  }

  // (f(a) - f(b)) / (a - b) summed in closed form; equals f'(a) at a == b.
  cplx divided_difference(double a, double b) const {
    const cplx I(0, 1);
    cplx f = 0;
    for (double t : teeth) f -= I * gamma / ((gamma + I * (t + a)) * (gamma + I * (t + b)));
    return f;
  }
};

inline cplx comb_lineshape(double omega, double gamma, int M, double delta0) {
  return Comb(gamma, M, delta0)(omega);
}

inline cplx comb_lineshape_derivative(double omega, double gamma, int M, double delta0) {
  return Comb(gamma, M, delta0).derivative(omega);
}

}  // namespace qmcap
