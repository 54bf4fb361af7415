#pragma once

#include <stdexcept>
#include <string>

namespace poa {

// Argument outside the mathematical domain of an operation (negative flow,
// a < 2 for geometric families, M <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Result not representable in native floating point; callers should switch
// to the log-domain entry points.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Operation not defined for this cost family or topology.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Non-differentiable point. Carries both one-sided derivatives.
class KinkError : public std::runtime_error {
 public:
  KinkError(const std::string& what, double left, double right)
      : std::runtime_error(what), left_(left), right_(right) {}
  double left() const { return left_; }
  double right() const { return right_; }

 private:
  double left_;
  double right_;
};

// Iterative solver stopped without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Malformed input document (network or cost JSON, curve CSV).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace poa
