#pragma once

#include <stdexcept>
#include <string>

namespace qmcap {

// Invalid parameters or inputs. Message names the violated condition.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Decomposition failures, non-finite states.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SingularLocusError : public ValidationError {
public:
  SingularLocusError(double k, double tau)
      : ValidationError("singular-locus: k=" + std::to_string(k) + " tau=" + std::to_string(tau)),
        k(k), tau(tau) {}
  double k;
  double tau;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace qmcap
