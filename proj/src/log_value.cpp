#include "poa/log_value.hpp"

#include "poa/errors.hpp"

namespace poa {

LogValue LogValue::from_double(double x) {
  if (x < 0.0) throw DomainError("LogValue holds nonnegative values only");
  if (x == 0.0) return zero();
  return from_log(std::log(x));
}

LogValue LogValue::operator/(const LogValue& o) const {
  if (o.zero_) throw DomainError("LogValue division by zero");
  if (zero_) return zero();
  return from_log(log_ - o.log_);
}

}  // namespace poa
