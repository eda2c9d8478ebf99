#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "padic/core.hpp"

namespace padic {

/// A named scalar nonlinearity with declared Lipschitz constant L and
/// sup-norm M. The normalization eval(0) = 0 is required.
struct Activation {
  std::string name;
  std::function<double(double)> eval;
  double lipschitz;   // L > 0
  double sup_norm;    // M in (0, inf]; infinity flags an unbounded map

  bool bounded() const { return std::isfinite(sup_norm); }
};

inline double pwl_sigmoid_eval(double s) {
  return 0.5 * (std::fabs(s + 1.0) - std::fabs(s - 1.0));
}

inline Activation make_tanh() {
  return {"tanh", [](double s) { return std::tanh(s); }, 1.0, 1.0};
}

inline Activation make_pwl_sigmoid() {
  return {"pwl_sigmoid", pwl_sigmoid_eval, 1.0, 1.0};
}

inline Activation make_identity() {
  return {"identity", [](double s) { return s; }, 1.0,
          std::numeric_limits<double>::infinity()};
}

inline Activation activation_by_name(const std::string& name) {
  if (name == "tanh") return make_tanh();
  if (name == "pwl_sigmoid") return make_pwl_sigmoid();
  if (name == "identity") return make_identity();
  throw DomainError("unknown activation: " + name);
}

}  // namespace padic
