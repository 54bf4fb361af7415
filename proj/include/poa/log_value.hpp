#pragma once

#include <cmath>
#include <compare>
#include <limits>

namespace poa {

/// A nonnegative quantity stored as its natural logarithm.
///
/// Used wherever costs such as e^x / x are evaluated far outside the range
/// of `double`. Exact zero is tracked separately so that `log(0)` never
/// enters the arithmetic.
class LogValue {
 public:
  constexpr LogValue() = default;

  static LogValue zero() { return LogValue(); }
  static LogValue from_log(double log_magnitude) {
    LogValue v;
    v.log_ = log_magnitude;
    v.zero_ = false;
    return v;
  }
  static LogValue from_double(double x);

  bool is_zero() const { return zero_; }
  double log_magnitude() const {
    return zero_ ? -std::numeric_limits<double>::infinity() : log_;
  }
  // +inf when the magnitude exceeds the double range.
  double to_double() const { return zero_ ? 0.0 : std::exp(log_); }
  bool representable() const { return zero_ || log_ < kMaxLog; }

  LogValue operator*(const LogValue& o) const {
    if (zero_ || o.zero_) return zero();
    return from_log(log_ + o.log_);
  }
  LogValue operator/(const LogValue& o) const;
  LogValue operator+(const LogValue& o) const {
    if (zero_) return o;
    if (o.zero_) return *this;
    const double hi = std::max(log_, o.log_);
    const double lo = std::min(log_, o.log_);
    return from_log(hi + std::log1p(std::exp(lo - hi)));
  }

  friend bool operator==(const LogValue& a, const LogValue& b) {
    return a.zero_ == b.zero_ && (a.zero_ || a.log_ == b.log_);
  }
  friend std::partial_ordering operator<=>(const LogValue& a,
                                           const LogValue& b) {
    return a.log_magnitude() <=> b.log_magnitude();
  }

  static constexpr double kMaxLog = 709.78;

 private:
  double log_ = 0.0;
  bool zero_ = true;
};

}  // namespace poa
