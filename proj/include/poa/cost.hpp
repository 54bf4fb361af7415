#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "poa/log_value.hpp"

namespace poa {

/// Closed interval [lo, hi]; hi may be +inf.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Increasing sequence 0 = alpha_0 < alpha_1 < alpha_2 < ... that sets the
/// breakpoints of a StepExp cost. Built from a named preset or given
/// explicitly.
class AlphaSequence {
 public:
  // alpha_k = k!, for k = 1..count.
  static AlphaSequence factorial(int count = 0);
  // alpha_k = base^(k^2), for k = 1..count.
  static AlphaSequence super_geometric(double base, int count = 0);
  static AlphaSequence explicit_values(std::vector<double> values);

  // alpha_k; alpha_0 == 0. Throws RangeError past the generated length.
  double at(int k) const;
  // Largest generated index K (alpha_K is the last breakpoint).
  int last_index() const { return static_cast<int>(values_.size()); }
  // Cell index k with y in (alpha_k, alpha_{k+1}], y > 0.
  int cell(double y) const;

  const std::string& preset() const { return preset_; }
  nlohmann::json to_json() const;
  static AlphaSequence from_json(const nlohmann::json& j);

 private:
  std::string preset_;  // "factorial", "super_geometric" or "explicit"
  double base_ = 0.0;
  std::vector<double> values_;  // alpha_1, alpha_2, ...
};

class CostFunction;

namespace family {

struct Affine {
  double a;
  double b;
};
struct Monomial {
  double coef;
  double degree;
};
// sum_i coeffs[i] * x^i
struct Polynomial {
  std::vector<double> coeffs;
};
struct Constant {
  double value;
};
// a^k on (a^{k-1}, a^k]
struct StepGeometric {
  double a;
};
// linear interpolation of x^2 between consecutive knots a^k
struct PwlSquare {
  double a;
};
// e on [0,1), e^x / x on [1, inf)
struct ExpOverX {};
// ExpOverX(alpha_{k+1}) on (alpha_k, alpha_{k+1}]
struct StepExp {
  std::shared_ptr<const AlphaSequence> alpha;
};
// a + b x + s x / (h + x)
struct Saturating {
  double a;
  double b;
  double s;
  double h;
};
// shift + base(x)
struct Shifted {
  std::shared_ptr<const CostFunction> base;
  double shift;
};

}  // namespace family

enum class Family {
  kAffine,
  kMonomial,
  kPolynomial,
  kConstant,
  kStepGeometric,
  kPwlSquare,
  kExpOverX,
  kStepExp,
  kSaturating,
  kShifted,
};

/// A weakly increasing, nonnegative edge latency from one of the closed
/// families above. Immutable; copies share any nested state.
class CostFunction {
 public:
  using Rep = std::variant<family::Affine, family::Monomial,
                           family::Polynomial, family::Constant,
                           family::StepGeometric, family::PwlSquare,
                           family::ExpOverX, family::StepExp,
                           family::Saturating, family::Shifted>;

  static CostFunction affine(double a, double b);
  static CostFunction identity() { return affine(0.0, 1.0); }
  static CostFunction monomial(double coef, double degree);
  static CostFunction polynomial(std::vector<double> coeffs);
  static CostFunction constant(double value);
  static CostFunction step_geometric(double a);
  static CostFunction pwl_square(double a);
  static CostFunction exp_over_x();
  static CostFunction step_exp(AlphaSequence alpha);
  static CostFunction saturating(double a, double b, double s, double h);
  static CostFunction shifted(CostFunction base, double shift);

  Family family() const;
  const Rep& rep() const { return rep_; }
  template <typename T>
  const T* as() const {
    return std::get_if<T>(&rep_);
  }

  double eval(double x) const;
  LogValue eval_log(double x) const;
  // lim_{s -> x+} c(s); differs from eval only at upward jumps.
  double right_limit(double x) const;

  // Exact derivative; throws KinkError at non-differentiable points.
  double derivative(double x) const;
  // One-sided derivatives {left, right}; equal at smooth points.
  Interval derivative_sides(double x) const;

  // Subdifferential of x -> x c(x): {c + x c'_-, c + x c'_+}.
  // Throws UnsupportedError for step families.
  Interval marginal(double x) const;
  bool has_marginal() const;
  // True when the marginal cost is single-valued and continuous, so that
  // marginal_inverse is available.
  bool has_continuous_marginal() const;

  double primitive(double x) const;

  // [inf{x >= 0 : c(x) >= lambda}, sup{x >= 0 : c(x) <= lambda}] with
  // inf of the empty set = +inf and sup of the empty set = 0.
  Interval generalized_inverse(double lambda) const;
  // Same construction applied to the marginal cost.
  Interval marginal_inverse(double mu) const;

  // lim_{x -> inf} c(x), +inf when unbounded.
  double asymptotic_value() const;

  bool is_continuous() const;
  // Jump or kink locations in (lo, hi].
  std::vector<double> breakpoints(double lo, double hi) const;

  nlohmann::json to_json() const;
  static CostFunction from_json(const nlohmann::json& j);
  std::string describe() const;

 private:
  explicit CostFunction(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

// Cell index k with x in (a^{k-1}, a^k], x > 0.
int geometric_cell(double a, double x);
// a^k for integer k.
double ipow(double a, int k);

}  // namespace poa
