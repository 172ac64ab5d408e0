#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace qmcap {

using cplx = std::complex<double>;

// e^{-|x|} I0(x) without overflow.
inline double scaled_bessel_i0(double x) {
  x = std::abs(x);
  if (x <= 40.0) {
    double q = 0.25 * x * x, term = 1.0, sum = 1.0;
    for (int k = 1; k < 500; ++k) {
      term *= q / (double(k) * k);
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return sum * std::exp(-x);
  }
  // large-argument expansion
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    double t = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (t < 1e-18 * sum || t > term) break;
    term = t;
    sum += term;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

// e^z - 1 without cancellation near z = 0.
inline cplx expm1(cplx z) {
  double a = z.real(), b = z.imag();
  double s = std::sin(0.5 * b);
  double re = std::expm1(a) * std::cos(b) - 2.0 * s * s;
  double im = std::exp(a) * std::sin(b);
  return {re, im};
}

// log(1+u) for complex u, accurate for small |u|.
inline cplx log1p(cplx u) {
  if (std::abs(u) < 1e-3) {
    cplx sum = 0.0, p = u;
    for (int k = 1; k <= 12; ++k) {
      sum += (k % 2 ? 1.0 : -1.0) * p / double(k);
      p *= u;
    }
    return sum;
  }
  return std::log(1.0 + u);
}

}  // namespace qmcap
