#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace qmcap {

enum class Protocol { unbroadened, tcrib, lcrib_analytic, lcrib_numeric, raman, afc };

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::unbroadened: return "unbroadened";
    case Protocol::tcrib: return "tcrib";
    case Protocol::lcrib_analytic: return "lcrib-analytic";
    case Protocol::lcrib_numeric: return "lcrib-numeric";
    case Protocol::raman: return "raman";
    case Protocol::afc: return "afc";
  }
  return "?";
}

inline Protocol protocol_from_string(const std::string& s) {
  for (Protocol p : {Protocol::unbroadened, Protocol::tcrib, Protocol::lcrib_analytic, Protocol::lcrib_numeric,
                     Protocol::raman, Protocol::afc})
    if (s == to_string(p)) return p;
  if (s == "lcrib") return Protocol::lcrib_numeric;
  throw ValidationError("protocol: unknown '" + s + "'");
}

// Gaussian control Rabi frequency amplitude*exp(-((t-center)/width)^2).
struct ControlPulse {
  double amplitude = 0.0;
  double center = 0.0;
  double width = 0.1;

  double operator()(double t) const {
    double u = (t - center) / width;
    return amplitude * std::exp(-u * u);
  }
};

// Physical parameters in units of gamma. For afc, d is the per-tooth depth.
struct ProtocolSpec {
  Protocol protocol = Protocol::unbroadened;
  double d = 1.0;
  double gamma = 1.0;
  double delta0 = 0.0;
  double delta = 0.0;
  int M = 1;
  std::optional<ControlPulse> control;

  void validate() const {
    require(std::isfinite(d) && d > 0, "d > 0 (got " + std::to_string(d) + ")");
    require(gamma == 1.0, "gamma == 1 (frequencies are in units of gamma)");
    require(std::isfinite(delta0) && delta0 >= 0, "delta0 >= 0 (got " + std::to_string(delta0) + ")");
    require(std::isfinite(delta), "delta finite");
    require(M >= 1, "M >= 1 (got " + std::to_string(M) + ")");
    if (protocol == Protocol::afc)
      require(M == 1 || delta0 > 0, "delta0 > 0 when M >= 2");
    if (protocol == Protocol::raman) {
      require(control.has_value(), "raman requires control pulse parameters");
      require(control->width > 0, "control width > 0");
      require(std::isfinite(control->amplitude) && std::isfinite(control->center), "control finite");
    }
  }

  double beta() const { return d * gamma / delta0; }
  double finesse() const { return M > 1 ? delta0 / (2.0 * gamma * (M - 1)) : INFINITY; }
  double total_depth() const { return protocol == Protocol::afc ? M * d : d; }

  std::vector<double> tooth_positions() const {
    if (M == 1) return {0.0};
    std::vector<double> t(M);
    for (int j = 0; j < M; ++j) t[j] = -0.5 * delta0 + j * delta0 / (M - 1);
    return t;
  }
};

inline ProtocolSpec unbroadened_spec(double d) {
  return {Protocol::unbroadened, d, 1.0, 0.0, 0.0, 1, std::nullopt};
}

inline ProtocolSpec tcrib_spec(double d, double delta0) {
  return {Protocol::tcrib, d, 1.0, delta0, 0.0, 1, std::nullopt};
}

inline ProtocolSpec lcrib_spec(double d, double delta0) {
  return {Protocol::lcrib_numeric, d, 1.0, delta0, 0.0, 1, std::nullopt};
}

// Comb of M teeth with spacing set by the finesse: delta0 = 2F(M-1).
inline ProtocolSpec afc_spec(double d, int M, double finesse) {
  return {Protocol::afc, d, 1.0, M > 1 ? 2.0 * finesse * (M - 1) : 0.0, 0.0, M, std::nullopt};
}

// Control sqrt(10d) exp(-(10 tau)^2), detuning sqrt(90d).
inline ProtocolSpec raman_spec(double d, double delta0) {
  return {Protocol::raman, d, 1.0, delta0, std::sqrt(90.0 * d), 1, ControlPulse{std::sqrt(10.0 * d), 0.0, 0.1}};
}

}  // namespace qmcap
