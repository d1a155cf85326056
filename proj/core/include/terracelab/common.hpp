#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace terracelab {

inline constexpr const char* kVersion = "0.1.0";

/// Three-valued verdict used by empirical classifiers.
enum class Tristate { yes, no, undetermined };

inline const char* to_string(Tristate t) {
  switch (t) {
    case Tristate::yes: return "yes";
    case Tristate::no: return "no";
    case Tristate::undetermined: return "undetermined";
  }
  return "?";
}

inline bool is_yes(Tristate t) { return t == Tristate::yes; }

inline double sq(double x) { return x * x; }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_finite(double x, const std::string& what) {
  if (!std::isfinite(x)) throw std::domain_error(what + " is not finite");
}

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace terracelab
