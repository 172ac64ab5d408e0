#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qmcap {

enum class Axis { position, time, frequency, spatial_frequency };

inline const char* to_string(Axis a) {
  switch (a) {
    case Axis::position: return "position";
    case Axis::time: return "time";
    case Axis::frequency: return "frequency";
    case Axis::spatial_frequency: return "spatial-frequency";
  }
  return "?";
}

struct Grid {
  std::vector<double> nodes;
  std::vector<double> weights;
  Axis axis = Axis::position;
  double lo = 0.0;
  double hi = 1.0;

  std::size_t size() const { return nodes.size(); }

  // Equal node spacing within a relative tolerance.
  bool is_uniform(double tol = 1e-9) const {
    if (nodes.size() < 2) return false;
    double h = nodes[1] - nodes[0];
    for (std::size_t i = 2; i < nodes.size(); ++i)
      if (std::abs((nodes[i] - nodes[i - 1]) - h) > tol * std::abs(h)) return false;
    return true;
  }

  double spacing() const { return nodes.size() > 1 ? nodes[1] - nodes[0] : 0.0; }

  void validate() const {
    require(nodes.size() == weights.size(), "grid: nodes and weights differ in length");
    require(!nodes.empty(), "grid: empty");
    require(lo < hi, "grid: lo < hi");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      require(std::isfinite(nodes[i]) && nodes[i] >= lo && nodes[i] <= hi, "grid: nodes within [lo, hi]");
      require(weights[i] > 0 && std::isfinite(weights[i]), "grid: weights > 0");
      if (i) require(nodes[i] > nodes[i - 1], "grid: nodes strictly increasing");
    }
  }

  bool operator==(const Grid& o) const {
    return axis == o.axis && lo == o.lo && hi == o.hi && nodes == o.nodes && weights == o.weights;
  }
};

namespace detail {

inline void check_interval(int n, double lo, double hi) {
  require(n >= 2, "grid: n >= 2 (got " + std::to_string(n) + ")");
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "grid: lo < hi");
}

// Legendre P_n and derivative at x.
inline void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) { p = 1.0; dp = 0.0; return; }
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

// Gauss-Legendre nodes/weights on [-1,1], ascending.
inline void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pi = std::numbers::pi;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double p = 0, dp = 1;
    for (int it = 0; it < 100; ++it) {
      legendre(n, z, p, dp);
      double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    legendre(n, z, p, dp);
    double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

}  // namespace detail

inline Grid gauss_legendre_grid(int n, double lo, double hi, Axis axis = Axis::position) {
  detail::check_interval(n, lo, hi);
  Grid g;
  g.axis = axis;
  g.lo = lo;
  g.hi = hi;
  std::vector<double> x, w;
  detail::gauss_legendre_unit(n, x, w);
  double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    g.nodes[i] = mid + half * x[i];
    g.weights[i] = half * w[i];
  }
  return g;
}

// Trapezoid rule on equally spaced nodes.
inline Grid uniform_grid(int n, double lo, double hi, Axis axis = Axis::time) {
  detail::check_interval(n, lo, hi);
  Grid g;
  g.axis = axis;
  g.lo = lo;
  g.hi = hi;
  double h = (hi - lo) / (n - 1);
  g.nodes.resize(n);
  g.weights.assign(n, h);
  for (int i = 0; i < n; ++i) g.nodes[i] = (i == n - 1) ? hi : lo + i * h;
  g.weights.front() = g.weights.back() = 0.5 * h;
  return g;
}

// Cell centres of n equal cells, weight h each.
inline Grid midpoint_grid(int n, double lo, double hi, Axis axis = Axis::time) {
  require(n >= 1, "grid: n >= 1");
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "grid: lo < hi");
  Grid g;
  g.axis = axis;
  g.lo = lo;
  g.hi = hi;
  double h = (hi - lo) / n;
  g.nodes.resize(n);
  g.weights.assign(n, h);
  for (int i = 0; i < n; ++i) g.nodes[i] = lo + (i + 0.5) * h;
  return g;
}

// Frequency grid on the whole real line: trapezoid core on [-W, W] plus
// Gauss-Legendre tails mapped through omega = W/s, s in (0,1).
inline Grid tailed_frequency_grid(int n_core, double half_width, int n_tail) {
  require(n_core >= 3, "frequency grid: n_core >= 3");
  require(half_width > 0, "frequency grid: half width > 0");
  require(n_tail >= 0, "frequency grid: tail nodes >= 0");
  Grid core = uniform_grid(n_core, -half_width, half_width, Axis::frequency);
  if (n_tail == 0) return core;
  Grid s = gauss_legendre_grid(n_tail, 0.0, 1.0);
  Grid g;
  g.axis = Axis::frequency;
  g.lo = -std::numeric_limits<double>::infinity();
  g.hi = std::numeric_limits<double>::infinity();
  // left tail: s ascending gives omega = -W/s ascending
  for (int i = 0; i < n_tail; ++i) {
    double si = s.nodes[i];
    g.nodes.push_back(-half_width / si);
    g.weights.push_back(s.weights[i] * half_width / (si * si));
  }
  g.nodes.insert(g.nodes.end(), core.nodes.begin(), core.nodes.end());
  g.weights.insert(g.weights.end(), core.weights.begin(), core.weights.end());
  for (int i = n_tail - 1; i >= 0; --i) {
    double si = s.nodes[i];
    g.nodes.push_back(half_width / si);
    g.weights.push_back(s.weights[i] * half_width / (si * si));
  }
  return g;
}

}  // namespace qmcap
