#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace synric {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown on precondition violations and unrecoverable numeric failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Kahan-Neumaier compensated accumulator. Cost sums feed log-ratios near 1,
/// so plain summation error is not acceptable there.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// log(sin(x)/x), finite for x in [0, pi). Series near 0, -inf at pi.
inline double log_sinc(double x) {
  x = std::abs(x);
  if (x < 1e-2) {
    const double x2 = x * x;
    return -x2 / 6.0 - x2 * x2 / 180.0 - x2 * x2 * x2 / 2835.0;
  }
  return std::log(std::sin(x) / x);
}

/// log(sinh(x)/x), finite for all x >= 0; overflow-safe for large x.
inline double log_sinch(double x) {
  x = std::abs(x);
  if (x < 1e-2) {
    const double x2 = x * x;
    return x2 / 6.0 - x2 * x2 / 180.0 + x2 * x2 * x2 / 2835.0;
  }
  if (x > 30.0) return x - std::log(2.0 * x) + std::log1p(-std::exp(-2.0 * x));
  return std::log(std::sinh(x) / x);
}

inline bool nearly_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol;
}

}  // namespace synric
