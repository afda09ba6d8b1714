#pragma once

#include <cmath>
#include <limits>

namespace multiport {

/// Real number stored as a sign and the natural log of its magnitude.
/// Keeps products and sums of terms like s!, Stirling numbers and eps^{-j}
/// representable far beyond the double range; sign == 0 iff the value is
/// exactly zero.
struct SignedLogReal {
  int sign = 0;
  double log_mag = -std::numeric_limits<double>::infinity();

  static SignedLogReal zero() { return {}; }
  static SignedLogReal one() { return {+1, 0.0}; }

  static SignedLogReal from_log(double log_magnitude, int sign = +1) {
    if (sign == 0) return zero();
    return {sign > 0 ? +1 : -1, log_magnitude};
  }

  static SignedLogReal from_double(double x) {
    if (x == 0.0) return zero();
    return {x > 0.0 ? +1 : -1, std::log(std::abs(x))};
  }

  bool is_zero() const { return sign == 0; }

  double to_double() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_mag);
  }

  SignedLogReal operator-() const { return {-sign, log_mag}; }

  friend SignedLogReal operator*(const SignedLogReal& a, const SignedLogReal& b) {
    if (a.sign == 0 || b.sign == 0) return zero();
    return {a.sign * b.sign, a.log_mag + b.log_mag};
  }

  friend SignedLogReal operator/(const SignedLogReal& a, const SignedLogReal& b) {
    if (a.sign == 0) return zero();
    return {a.sign * b.sign, a.log_mag - b.log_mag};
  }

  friend SignedLogReal operator+(const SignedLogReal& a, const SignedLogReal& b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    const SignedLogReal& hi = (a.log_mag >= b.log_mag) ? a : b;
    const SignedLogReal& lo = (a.log_mag >= b.log_mag) ? b : a;
    const double r = std::exp(lo.log_mag - hi.log_mag);  // in [0, 1]
    if (hi.sign == lo.sign) {
      return {hi.sign, hi.log_mag + std::log1p(r)};
    }
    if (r == 1.0) return zero();
    return {hi.sign, hi.log_mag + std::log1p(-r)};
  }

  friend SignedLogReal operator-(const SignedLogReal& a, const SignedLogReal& b) {
    return a + (-b);
  }
};

/// Streaming accumulator for sums of SignedLogReal terms of one sign.
/// Tracks the running maximum exponent so the final log-sum-exp stays exact
/// for magnitudes spanning thousands of orders.
class LogSumAccumulator {
 public:
  void add_log(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term > max_) {
      scaled_sum_ = scaled_sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      scaled_sum_ += std::exp(log_term - max_);
    }
  }

  bool empty() const { return scaled_sum_ == 0.0; }

  /// ln of the accumulated sum (-inf when no terms were added).
  double log_sum() const {
    if (scaled_sum_ == 0.0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(scaled_sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_sum_ = 0.0;
};

}  // namespace multiport
