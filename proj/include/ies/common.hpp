#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ies {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised when a scenario file or CLI input fails schema or invariant checks.
/// The message names the offending field or invariant.
class InputError : public std::runtime_error {
public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when the optimizer cannot continue (subproblem failure, bad program).
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

template <typename... Args>
std::string format_msg(Args&&... args) {
  std::ostringstream oss;
  (oss << ... << args);
  return oss.str();
}

/// Shortest round-trip decimal representation of a double. Used everywhere a
/// floating value lands in an output file so that reruns are byte-identical.
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace ies
