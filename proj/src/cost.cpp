#include "poa/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "poa/errors.hpp"

namespace poa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kE = std::numbers::e;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_nonneg(double x, const char* what) {
  if (!(x >= 0.0)) {
    throw DomainError(std::string(what) + ": argument must be >= 0, got " +
                      std::to_string(x));
  }
}

// ln(e^x / x) for x >= 1, and 1 below.
double exp_over_x_log(double x) { return x < 1.0 ? 1.0 : x - std::log(x); }

double checked_exp(double log_value, const char* what) {
  if (log_value >= LogValue::kMaxLog) {
    throw RangeError(std::string(what) +
                     ": value overflows double, use eval_log");
  }
  return std::exp(log_value);
}

// Inverse of a continuous, strictly increasing f on [0, inf) at level
// lambda. Returns a degenerate interval at the closest double.
template <typename F>
Interval increasing_inverse(const F& f, double lambda) {
  if (lambda <= f(0.0)) return {0.0, 0.0};
  double hi = 1.0;
  while (f(hi) < lambda) {
    hi *= 2.0;
    if (hi > 1e300) return {kInf, kInf};
  }
  double lo = hi / 2.0;
  while (f(lo) >= lambda) {
    hi = lo;
    lo /= 2.0;
    if (lo < 1e-300) return {0.0, 0.0};
  }
  // f(lo) < lambda <= f(hi)
  for (int it = 0; it < 200; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < lambda) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double x = (f(hi) - lambda <= lambda - f(lo)) ? hi : lo;
  return {x, x};
}

// Generalized inverse of a flat function with value v.
Interval flat_inverse(double v, double lambda) {
  if (lambda < v) return {0.0, 0.0};
  if (lambda == v) return {0.0, kInf};
  return {kInf, kInf};
}

double poly_eval(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

bool poly_is_flat(const std::vector<double>& c) {
  return std::all_of(c.begin() + std::min<std::size_t>(1, c.size()), c.end(),
                     [](double v) { return v == 0.0; });
}

double json_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) {
    throw ParseError(std::string("cost spec: missing field '") + key + "'");
  }
  const auto& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
      throw ParseError(std::string("cost spec: field '") + key +
                       "' is not a decimal number: " + s);
    }
    return d;
  }
  throw ParseError(std::string("cost spec: field '") + key +
                   "' must be a number or decimal string");
}

void require_geometric_base(double a) {
  if (!(a >= 2.0) || !std::isfinite(a)) {
    throw DomainError("geometric cost families need a >= 2");
  }
}

}  // namespace

double ipow(double a, int k) { return std::pow(a, static_cast<double>(k)); }

int geometric_cell(double a, double x) {
  int k = static_cast<int>(std::ceil(std::log(x) / std::log(a)));
  while (ipow(a, k - 1) >= x) --k;
  while (ipow(a, k) < x) ++k;
  return k;
}

// ---------------------------------------------------------------------------
// AlphaSequence

AlphaSequence AlphaSequence::factorial(int count) {
  AlphaSequence s;
  s.preset_ = "factorial";
  double v = 1.0;
  for (int k = 1; count <= 0 || k <= count; ++k) {
    v *= k;
    if (v > 1e300) break;
    s.values_.push_back(v);
  }
  return s;
}

AlphaSequence AlphaSequence::super_geometric(double base, int count) {
  if (!(base > 1.0)) throw DomainError("super_geometric alpha needs base > 1");
  AlphaSequence s;
  s.preset_ = "super_geometric";
  s.base_ = base;
  for (int k = 1; count <= 0 || k <= count; ++k) {
    const double v = std::pow(base, static_cast<double>(k) * k);
    if (v > 1e300) break;
    s.values_.push_back(v);
  }
  return s;
}

AlphaSequence AlphaSequence::explicit_values(std::vector<double> values) {
  double prev = 0.0;
  for (double v : values) {
    if (!(v > prev)) {
      throw DomainError("alpha sequence must be positive and increasing");
    }
    prev = v;
  }
  AlphaSequence s;
  s.preset_ = "explicit";
  s.values_ = std::move(values);
  return s;
}

double AlphaSequence::at(int k) const {
  if (k == 0) return 0.0;
  if (k < 0 || k > last_index()) {
    throw RangeError("alpha index " + std::to_string(k) +
                     " outside generated range 0.." +
                     std::to_string(last_index()));
  }
  return values_[static_cast<std::size_t>(k - 1)];
}

int AlphaSequence::cell(double y) const {
  if (y <= 0.0) return 0;
  const auto it = std::lower_bound(values_.begin(), values_.end(), y);
  if (it == values_.end()) {
    throw RangeError("flow exceeds the last alpha breakpoint");
  }
  return static_cast<int>(it - values_.begin());
}

nlohmann::json AlphaSequence::to_json() const {
  nlohmann::json j;
  if (preset_ == "explicit") {
    j["values"] = values_;
  } else {
    j["preset"] = preset_;
    j["count"] = values_.size();
    if (preset_ == "super_geometric") j["base"] = base_;
  }
  return j;
}

AlphaSequence AlphaSequence::from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "factorial") return factorial();
    throw ParseError("unknown alpha preset " + j.get<std::string>());
  }
  if (j.contains("values")) {
    return explicit_values(j.at("values").get<std::vector<double>>());
  }
  const std::string preset = j.value("preset", "");
  const int count = j.value("count", 0);
  if (preset == "factorial") return factorial(count);
  if (preset == "super_geometric") {
    return super_geometric(json_number(j, "base"), count);
  }
  throw ParseError("alpha spec needs 'values' or a known 'preset'");
}

// ---------------------------------------------------------------------------
// Construction

CostFunction CostFunction::affine(double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) {
    throw DomainError("affine cost needs a >= 0, b >= 0");
  }
  return CostFunction(family::Affine{a, b});
}

CostFunction CostFunction::monomial(double coef, double degree) {
  if (!(coef > 0.0) || !(degree > 0.0)) {
    throw DomainError("monomial cost needs coef > 0, degree > 0");
  }
  return CostFunction(family::Monomial{coef, degree});
}

CostFunction CostFunction::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw DomainError("polynomial cost needs coefficients");
  for (double c : coeffs) {
    if (!(c >= 0.0)) {
      throw DomainError("polynomial cost needs nonnegative coefficients");
    }
  }
  return CostFunction(family::Polynomial{std::move(coeffs)});
}

CostFunction CostFunction::constant(double value) {
  if (!(value >= 0.0)) throw DomainError("constant cost needs value >= 0");
  return CostFunction(family::Constant{value});
}

CostFunction CostFunction::step_geometric(double a) {
  require_geometric_base(a);
  return CostFunction(family::StepGeometric{a});
}

CostFunction CostFunction::pwl_square(double a) {
  require_geometric_base(a);
  return CostFunction(family::PwlSquare{a});
}

CostFunction CostFunction::exp_over_x() {
  return CostFunction(family::ExpOverX{});
}

CostFunction CostFunction::step_exp(AlphaSequence alpha) {
  if (alpha.last_index() < 1) throw DomainError("step_exp needs alpha_1");
  return CostFunction(
      family::StepExp{std::make_shared<const AlphaSequence>(std::move(alpha))});
}

CostFunction CostFunction::saturating(double a, double b, double s,
                                      double h) {
  if (!(a >= 0.0) || !(b >= 0.0) || !(s >= 0.0) || !(h > 0.0)) {
    throw DomainError("saturating cost needs a, b, s >= 0 and h > 0");
  }
  return CostFunction(family::Saturating{a, b, s, h});
}

CostFunction CostFunction::shifted(CostFunction base, double shift) {
  if (!(shift >= 0.0)) throw DomainError("shifted cost needs shift >= 0");
  return CostFunction(family::Shifted{
      std::make_shared<const CostFunction>(std::move(base)), shift});
}

Family CostFunction::family() const {
  return static_cast<Family>(rep_.index());
}

// ---------------------------------------------------------------------------
// Evaluation

double CostFunction::eval(double x) const {
  require_nonneg(x, "eval");
  return std::visit(
      overloaded{
          [&](const family::Affine& f) { return f.a + f.b * x; },
          [&](const family::Monomial& f) {
            return f.coef * std::pow(x, f.degree);
          },
          [&](const family::Polynomial& f) { return poly_eval(f.coeffs, x); },
          [&](const family::Constant& f) { return f.value; },
          [&](const family::StepGeometric& f) {
            return x == 0.0 ? 0.0 : ipow(f.a, geometric_cell(f.a, x));
          },
          [&](const family::PwlSquare& f) {
            if (x == 0.0) return 0.0;
            const int k = geometric_cell(f.a, x);
            const double lo = ipow(f.a, k - 1);
            const double hi = ipow(f.a, k);
            if (x == hi) return hi * hi;
            return (lo + hi) * x - lo * hi;
          },
          [&](const family::ExpOverX&) {
            return x < 1.0 ? kE : checked_exp(exp_over_x_log(x), "exp_over_x");
          },
          [&](const family::StepExp& f) {
            const double level = f.alpha->at(f.alpha->cell(x) + 1);
            return checked_exp(exp_over_x_log(level), "step_exp");
          },
          [&](const family::Saturating& f) {
            return f.a + f.b * x + f.s * x / (f.h + x);
          },
          [&](const family::Shifted& f) { return f.shift + f.base->eval(x); },
      },
      rep_);
}

LogValue CostFunction::eval_log(double x) const {
  require_nonneg(x, "eval_log");
  return std::visit(
      overloaded{
          [&](const family::Monomial& f) {
            if (x == 0.0) return LogValue::zero();
            return LogValue::from_log(std::log(f.coef) +
                                      f.degree * std::log(x));
          },
          [&](const family::Polynomial& f) {
            LogValue sum;
            const double lx = std::log(x);
            for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
              if (f.coeffs[i] == 0.0) continue;
              if (i > 0 && x == 0.0) continue;
              sum = sum + LogValue::from_log(std::log(f.coeffs[i]) +
                                             static_cast<double>(i) * lx);
            }
            return sum;
          },
          [&](const family::StepGeometric& f) {
            if (x == 0.0) return LogValue::zero();
            return LogValue::from_log(geometric_cell(f.a, x) * std::log(f.a));
          },
          [&](const family::ExpOverX&) {
            return LogValue::from_log(exp_over_x_log(x));
          },
          [&](const family::StepExp& f) {
            return LogValue::from_log(
                exp_over_x_log(f.alpha->at(f.alpha->cell(x) + 1)));
          },
          [&](const family::Shifted& f) {
            return LogValue::from_double(f.shift) + f.base->eval_log(x);
          },
          [&](const auto&) { return LogValue::from_double(eval(x)); },
      },
      rep_);
}

double CostFunction::right_limit(double x) const {
  require_nonneg(x, "right_limit");
  return std::visit(
      overloaded{
          [&](const family::StepGeometric& f) {
            if (x == 0.0) return 0.0;
            const int k = geometric_cell(f.a, x);
            return x == ipow(f.a, k) ? ipow(f.a, k + 1) : ipow(f.a, k);
          },
          [&](const family::StepExp& f) {
            int k = f.alpha->cell(x);
            if (x > 0.0 && x == f.alpha->at(k + 1)) ++k;
            return checked_exp(exp_over_x_log(f.alpha->at(k + 1)), "step_exp");
          },
          [&](const family::Shifted& f) {
            return f.shift + f.base->right_limit(x);
          },
          [&](const auto&) { return eval(x); },
      },
      rep_);
}

Interval CostFunction::derivative_sides(double x) const {
  require_nonneg(x, "derivative");
  return std::visit(
      overloaded{
          [&](const family::Affine& f) { return Interval{f.b, f.b}; },
          [&](const family::Monomial& f) {
            double d;
            if (x == 0.0) {
              d = f.degree < 1.0 ? kInf : (f.degree == 1.0 ? f.coef : 0.0);
            } else {
              d = f.coef * f.degree * std::pow(x, f.degree - 1.0);
            }
            return Interval{d, d};
          },
          [&](const family::Polynomial& f) {
            double d = 0.0;
            for (std::size_t i = f.coeffs.size(); i-- > 1;) {
              d = d * x + static_cast<double>(i) * f.coeffs[i];
            }
            return Interval{d, d};
          },
          [&](const family::Constant&) { return Interval{0.0, 0.0}; },
          [&](const family::StepGeometric& f) {
            if (x == 0.0) return Interval{0.0, kInf};
            const bool knot = x == ipow(f.a, geometric_cell(f.a, x));
            return Interval{0.0, knot ? kInf : 0.0};
          },
          [&](const family::PwlSquare& f) {
            if (x == 0.0) return Interval{0.0, 0.0};
            const int k = geometric_cell(f.a, x);
            const double slope = ipow(f.a, k - 1) + ipow(f.a, k);
            if (x == ipow(f.a, k)) {
              return Interval{slope, ipow(f.a, k) + ipow(f.a, k + 1)};
            }
            return Interval{slope, slope};
          },
          [&](const family::ExpOverX&) {
            if (x <= 1.0) return Interval{0.0, 0.0};
            // e^x (x - 1) / x^2
            const double d = checked_exp(
                x + std::log(x - 1.0) - 2.0 * std::log(x), "exp_over_x");
            return Interval{d, d};
          },
          [&](const family::StepExp& f) {
            const int k = f.alpha->cell(x);
            const bool knot = x > 0.0 && x == f.alpha->at(k + 1);
            return Interval{0.0, knot ? kInf : 0.0};
          },
          [&](const family::Saturating& f) {
            const double d = f.b + f.s * f.h / ((f.h + x) * (f.h + x));
            return Interval{d, d};
          },
          [&](const family::Shifted& f) {
            return f.base->derivative_sides(x);
          },
      },
      rep_);
}

double CostFunction::derivative(double x) const {
  const Interval d = derivative_sides(x);
  if (d.lo != d.hi) {
    std::ostringstream os;
    os << describe() << " is not differentiable at x = " << x
       << " (left " << d.lo << ", right " << d.hi << ")";
    throw KinkError(os.str(), d.lo, d.hi);
  }
  return d.lo;
}

bool CostFunction::has_marginal() const {
  return std::visit(
      overloaded{
          [](const family::StepGeometric&) { return false; },
          [](const family::StepExp&) { return false; },
          [](const family::Shifted& f) { return f.base->has_marginal(); },
          [](const auto&) { return true; },
      },
      rep_);
}

bool CostFunction::has_continuous_marginal() const {
  return std::visit(
      overloaded{
          [](const family::PwlSquare&) { return false; },
          [](const family::Shifted& f) {
            return f.base->has_continuous_marginal();
          },
          [this](const auto&) { return has_marginal(); },
      },
      rep_);
}

Interval CostFunction::marginal(double x) const {
  if (!has_marginal()) {
    throw UnsupportedError("marginal cost undefined for step family " +
                           describe());
  }
  const double c = eval(x);
  if (x == 0.0) return {c, c};
  const Interval d = derivative_sides(x);
  return {c + x * d.lo, c + x * d.hi};
}

double CostFunction::primitive(double x) const {
  require_nonneg(x, "primitive");
  return std::visit(
      overloaded{
          [&](const family::Affine& f) { return f.a * x + 0.5 * f.b * x * x; },
          [&](const family::Monomial& f) {
            return f.coef * std::pow(x, f.degree + 1.0) / (f.degree + 1.0);
          },
          [&](const family::Polynomial& f) {
            double r = 0.0;
            for (std::size_t i = f.coeffs.size(); i-- > 0;) {
              r = r * x + f.coeffs[i] / static_cast<double>(i + 1);
            }
            return r * x;
          },
          [&](const family::Constant& f) { return f.value * x; },
          [&](const family::StepGeometric& f) {
            if (x == 0.0) return 0.0;
            const double a = f.a;
            const int k = geometric_cell(a, x);
            // sum_{j <= k-1} a^j (a^j - a^{j-1}) = a^{2k-1} / (a + 1)
            const double tail = ipow(a, 2 * k - 1) / (a + 1.0);
            return tail + ipow(a, k) * (x - ipow(a, k - 1));
          },
          [&](const family::PwlSquare& f) {
            if (x == 0.0) return 0.0;
            const double a = f.a;
            const int k = geometric_cell(a, x);
            // piece [u, a u] integrates to u^3 (a-1)(a^2+1)/2
            const double piece = (a - 1.0) * (a * a + 1.0) / 2.0;
            const double tail = piece * ipow(a, 3 * (k - 2)) /
                                (1.0 - 1.0 / (a * a * a));
            const double u = ipow(a, k - 1);
            const double s = u + ipow(a, k);
            const double p = u * ipow(a, k);
            return tail + 0.5 * s * (x * x - u * u) - p * (x - u);
          },
          [&](const family::ExpOverX&) {
            if (x <= 1.0) return kE * x;
            const double r = kE + std::expint(x) - std::expint(1.0);
            if (!std::isfinite(r)) throw RangeError("exp_over_x primitive overflow");
            return r;
          },
          [&](const family::StepExp& f) {
            const int k = f.alpha->cell(x);
            double r = 0.0;
            for (int j = 0; j < k; ++j) {
              const double level = checked_exp(
                  exp_over_x_log(f.alpha->at(j + 1)), "step_exp primitive");
              r += level * (f.alpha->at(j + 1) - f.alpha->at(j));
            }
            const double level = checked_exp(
                exp_over_x_log(f.alpha->at(k + 1)), "step_exp primitive");
            return r + level * (x - f.alpha->at(k));
          },
          [&](const family::Saturating& f) {
            return f.a * x + 0.5 * f.b * x * x +
                   f.s * (x - f.h * std::log1p(x / f.h));
          },
          [&](const family::Shifted& f) {
            return f.shift * x + f.base->primitive(x);
          },
      },
      rep_);
}

Interval CostFunction::generalized_inverse(double lambda) const {
  if (!(lambda >= 0.0)) {
    throw DomainError("generalized_inverse: level must be >= 0");
  }
  return std::visit(
      overloaded{
          [&](const family::Affine& f) {
            if (f.b == 0.0) return flat_inverse(f.a, lambda);
            if (lambda < f.a) return Interval{0.0, 0.0};
            const double x = (lambda - f.a) / f.b;
            return Interval{x, x};
          },
          [&](const family::Monomial& f) {
            const double x = std::pow(lambda / f.coef, 1.0 / f.degree);
            return Interval{x, x};
          },
          [&](const family::Polynomial& f) {
            if (poly_is_flat(f.coeffs)) return flat_inverse(f.coeffs[0], lambda);
            return increasing_inverse(
                [&](double x) { return poly_eval(f.coeffs, x); }, lambda);
          },
          [&](const family::Constant& f) {
            return flat_inverse(f.value, lambda);
          },
          [&](const family::StepGeometric& f) {
            if (lambda == 0.0) return Interval{0.0, 0.0};
            const double a = f.a;
            // largest a^m <= lambda, smallest a^n >= lambda
            int m = static_cast<int>(std::floor(std::log(lambda) / std::log(a)));
            while (ipow(a, m) > lambda) --m;
            while (ipow(a, m + 1) <= lambda) ++m;
            const int n = ipow(a, m) == lambda ? m : m + 1;
            return Interval{ipow(a, n - 1), ipow(a, m)};
          },
          [&](const family::PwlSquare& f) {
            if (lambda == 0.0) return Interval{0.0, 0.0};
            const double a = f.a;
            int k = geometric_cell(a, std::sqrt(lambda));
            while (ipow(a, 2 * (k - 1)) >= lambda) --k;
            while (ipow(a, 2 * k) < lambda) ++k;
            const double lo = ipow(a, k - 1);
            const double hi = ipow(a, k);
            const double y =
                std::clamp((lambda + lo * hi) / (lo + hi), lo, hi);
            return Interval{y, y};
          },
          [&](const family::ExpOverX&) {
            if (lambda < kE) return Interval{0.0, 0.0};
            if (lambda == kE) return Interval{0.0, 1.0};
            // x - ln x = ln lambda on [1, inf)
            const double target = std::log(lambda);
            double lo = 1.0;
            double hi = 2.0;
            while (exp_over_x_log(hi) < target) hi *= 2.0;
            for (int it = 0; it < 200; ++it) {
              const double mid = lo + 0.5 * (hi - lo);
              if (mid <= lo || mid >= hi) break;
              (exp_over_x_log(mid) < target ? lo : hi) = mid;
            }
            return Interval{hi, hi};
          },
          [&](const family::StepExp& f) {
            const AlphaSequence& alpha = *f.alpha;
            // level of cell (alpha_{j-1}, alpha_j] is c(alpha_j)
            auto level = [&](int j) {
              return std::exp(exp_over_x_log(alpha.at(j)));
            };
            int m = 0;  // max j with level(j) <= lambda
            while (m + 1 <= alpha.last_index() && level(m + 1) <= lambda) ++m;
            int n = 1;  // min j with level(j) >= lambda
            while (n <= alpha.last_index() && level(n) < lambda) ++n;
            const double lo = n > alpha.last_index() ? kInf : alpha.at(n - 1);
            return Interval{lo, alpha.at(m)};
          },
          [&](const family::Saturating& f) {
            if (f.b == 0.0 && f.s == 0.0) return flat_inverse(f.a, lambda);
            return increasing_inverse(
                [&](double x) { return f.a + f.b * x + f.s * x / (f.h + x); },
                lambda);
          },
          [&](const family::Shifted& f) {
            if (lambda < f.shift) return Interval{0.0, 0.0};
            return f.base->generalized_inverse(lambda - f.shift);
          },
      },
      rep_);
}

Interval CostFunction::marginal_inverse(double mu) const {
  if (!(mu >= 0.0)) throw DomainError("marginal_inverse: level must be >= 0");
  return std::visit(
      overloaded{
          [&](const family::Affine& f) {
            if (f.b == 0.0) return flat_inverse(f.a, mu);
            if (mu < f.a) return Interval{0.0, 0.0};
            const double x = (mu - f.a) / (2.0 * f.b);
            return Interval{x, x};
          },
          [&](const family::Monomial& f) {
            const double x =
                std::pow(mu / (f.coef * (1.0 + f.degree)), 1.0 / f.degree);
            return Interval{x, x};
          },
          [&](const family::Polynomial& f) {
            if (poly_is_flat(f.coeffs)) return flat_inverse(f.coeffs[0], mu);
            return increasing_inverse(
                [&](double x) {
                  double r = 0.0;
                  for (std::size_t i = f.coeffs.size(); i-- > 0;) {
                    r = r * x + static_cast<double>(i + 1) * f.coeffs[i];
                  }
                  return r;
                },
                mu);
          },
          [&](const family::Constant& f) { return flat_inverse(f.value, mu); },
          [&](const family::ExpOverX&) {
            // (x c(x))' is e on [0,1) and e^x beyond
            if (mu < kE) return Interval{0.0, 0.0};
            if (mu == kE) return Interval{0.0, 1.0};
            const double x = std::log(mu);
            return Interval{x, x};
          },
          [&](const family::Saturating& f) {
            if (f.b == 0.0 && f.s == 0.0) return flat_inverse(f.a, mu);
            return increasing_inverse(
                [&](double x) {
                  const double q = f.h + x;
                  return f.a + 2.0 * f.b * x + f.s * x / q +
                         f.s * x * f.h / (q * q);
                },
                mu);
          },
          [&](const family::Shifted& f) {
            if (mu < f.shift) return Interval{0.0, 0.0};
            return f.base->marginal_inverse(mu - f.shift);
          },
          [&](const auto&) -> Interval {
            throw UnsupportedError("marginal inverse needs a smooth cost, got " +
                                   describe());
          },
      },
      rep_);
}

double CostFunction::asymptotic_value() const {
  return std::visit(
      overloaded{
          [](const family::Affine& f) { return f.b > 0.0 ? kInf : f.a; },
          [](const family::Polynomial& f) {
            return poly_is_flat(f.coeffs) ? f.coeffs[0] : kInf;
          },
          [](const family::Constant& f) { return f.value; },
          [](const family::Saturating& f) {
            return f.b > 0.0 ? kInf : f.a + f.s;
          },
          [](const family::Shifted& f) {
            return f.shift + f.base->asymptotic_value();
          },
          [](const auto&) { return kInf; },
      },
      rep_);
}

bool CostFunction::is_continuous() const {
  return std::visit(
      overloaded{
          [](const family::StepGeometric&) { return false; },
          [](const family::StepExp&) { return false; },
          [](const family::Shifted& f) { return f.base->is_continuous(); },
          [](const auto&) { return true; },
      },
      rep_);
}

std::vector<double> CostFunction::breakpoints(double lo, double hi) const {
  std::vector<double> out;
  if (!(hi > lo)) return out;
  auto geometric = [&](double a) {
    const double start = std::max(lo, hi * 1e-12);
    for (int k = geometric_cell(a, start); ipow(a, k) <= hi; ++k) {
      if (ipow(a, k) > lo) out.push_back(ipow(a, k));
    }
  };
  std::visit(
      overloaded{
          [&](const family::StepGeometric& f) { geometric(f.a); },
          [&](const family::PwlSquare& f) { geometric(f.a); },
          [&](const family::StepExp& f) {
            for (int j = 1; j <= f.alpha->last_index(); ++j) {
              const double v = f.alpha->at(j);
              if (v > lo && v <= hi) out.push_back(v);
            }
          },
          [&](const family::Shifted& f) { out = f.base->breakpoints(lo, hi); },
          [](const auto&) {},
      },
      rep_);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json CostFunction::to_json() const {
  using nlohmann::json;
  return std::visit(
      overloaded{
          [](const family::Affine& f) {
            return json{{"family", "affine"}, {"a", f.a}, {"b", f.b}};
          },
          [](const family::Monomial& f) {
            return json{
                {"family", "monomial"}, {"coef", f.coef}, {"degree", f.degree}};
          },
          [](const family::Polynomial& f) {
            return json{{"family", "polynomial"}, {"coeffs", f.coeffs}};
          },
          [](const family::Constant& f) {
            return json{{"family", "constant"}, {"value", f.value}};
          },
          [](const family::StepGeometric& f) {
            return json{{"family", "step_geometric"}, {"a", f.a}};
          },
          [](const family::PwlSquare& f) {
            return json{{"family", "pwl_square"}, {"a", f.a}};
          },
          [](const family::ExpOverX&) { return json{{"family", "exp_over_x"}}; },
          [](const family::StepExp& f) {
            return json{{"family", "step_exp"}, {"alpha", f.alpha->to_json()}};
          },
          [](const family::Saturating& f) {
            return json{{"family", "saturating"},
                        {"a", f.a},
                        {"b", f.b},
                        {"s", f.s},
                        {"h", f.h}};
          },
          [](const family::Shifted& f) {
            return json{{"family", "shifted"},
                        {"shift", f.shift},
                        {"base", f.base->to_json()}};
          },
      },
      rep_);
}

CostFunction CostFunction::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw ParseError("cost spec must be an object with a string 'family'");
  }
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "affine") return affine(json_number(j, "a"), json_number(j, "b"));
  if (fam == "monomial") {
    return monomial(json_number(j, "coef"), json_number(j, "degree"));
  }
  if (fam == "polynomial") {
    if (!j.contains("coeffs") || !j.at("coeffs").is_array()) {
      throw ParseError("polynomial cost needs a 'coeffs' array");
    }
    std::vector<double> coeffs;
    for (std::size_t i = 0; i < j.at("coeffs").size(); ++i) {
      nlohmann::json wrap{{"c", j.at("coeffs").at(i)}};
      coeffs.push_back(json_number(wrap, "c"));
    }
    return polynomial(std::move(coeffs));
  }
  if (fam == "constant") return constant(json_number(j, "value"));
  if (fam == "step_geometric") return step_geometric(json_number(j, "a"));
  if (fam == "pwl_square") return pwl_square(json_number(j, "a"));
  if (fam == "exp_over_x") return exp_over_x();
  if (fam == "step_exp") {
    if (!j.contains("alpha")) throw ParseError("step_exp needs 'alpha'");
    return step_exp(AlphaSequence::from_json(j.at("alpha")));
  }
  if (fam == "saturating") {
    return saturating(json_number(j, "a"), json_number(j, "b"),
                      json_number(j, "s"), json_number(j, "h"));
  }
  if (fam == "shifted") {
    if (!j.contains("base")) throw ParseError("shifted cost needs 'base'");
    return shifted(from_json(j.at("base")), json_number(j, "shift"));
  }
  throw ParseError("unknown cost family '" + fam + "'");
}

std::string CostFunction::describe() const {
  return to_json().dump();
}

}  // namespace poa
