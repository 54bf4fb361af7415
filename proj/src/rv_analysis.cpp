#include "poa/rv_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poa/errors.hpp"

namespace poa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDecayFloor = 1e-12;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

LogFunction log_of(const CostFunction& c) {
  return [c](double x) { return c.eval_log(x).log_magnitude(); };
}

double inverse_at(const CostFunction& c, double y) {
  const Interval r = c.generalized_inverse(y);
  if (!std::isfinite(r.lo)) throw RangeError("inverse not finite at probe");
  return r.lo;
}

RvReport with_expected(RvReport r, double expected, double tol) {
  r.expected = expected;
  r.has_expected = true;
  if (std::abs(r.beta - expected) > tol) {
    r.pass = false;
    r.diagnostic = "index " + std::to_string(r.beta) + " differs from " +
                   std::to_string(expected);
  }
  return r;
}

RvReport not_applicable(std::string name, std::string why) {
  RvReport r;
  r.name = std::move(name);
  r.applicable = false;
  r.pass = true;
  r.diagnostic = std::move(why);
  return r;
}

}  // namespace

void RvProbe::validate() const {
  if (scales.empty() || grid.size() < 2) {
    throw DomainError("probe needs scales and at least two grid points");
  }
  for (double a : scales) {
    if (!(a > 0.0) || a == 1.0) throw DomainError("scale factors must be > 0 and != 1");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("probe grid must increase");
  }
  if (!(grid.front() > 0.0)) throw DomainError("probe grid must be positive");
}

nlohmann::json RvReport::to_json() const {
  nlohmann::json j{{"name", name},
                   {"beta", beta},
                   {"residual", residual},
                   {"residuals", residuals},
                   {"decays", decays},
                   {"pass", pass},
                   {"applicable", applicable}};
  if (has_expected) j["expected"] = expected;
  if (!diagnostic.empty()) j["diagnostic"] = diagnostic;
  return j;
}

RvReport rv_index(const LogFunction& log_f, const RvProbe& probe,
                  std::string name) {
  probe.validate();
  RvReport r;
  r.name = std::move(name);
  const std::size_t n = probe.grid.size();
  const std::size_t upper = n / 2;

  // log ratios ln(f(ax) / f(x)) per grid point and scale
  std::vector<std::vector<double>> lr(n);
  std::vector<double> estimates;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = probe.grid[i];
    const double fx = log_f(x);
    if (!std::isfinite(fx)) {
      throw DomainError(r.name + ": function not positive and finite at probe");
    }
    for (double a : probe.scales) {
      const double v = log_f(a * x) - fx;
      lr[i].push_back(v);
      if (i + 1 == n) estimates.push_back(v / std::log(a));
    }
  }
  r.beta = median(estimates);
  if (!std::isfinite(r.beta)) r.beta = kInf;

  for (std::size_t i = 0; i < n; ++i) {
    double worst = 0.0;
    for (std::size_t s = 0; s < probe.scales.size(); ++s) {
      const double dev = std::expm1(lr[i][s] - r.beta * std::log(probe.scales[s]));
      worst = std::max(worst, std::isfinite(dev) ? std::abs(dev) : kInf);
    }
    r.residuals.push_back(worst);
    if (i >= upper) r.residual = std::max(r.residual, worst);
  }
  r.decays = true;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(r.residuals[i] <= r.residuals[i - 1] + kDecayFloor)) r.decays = false;
  }
  r.pass = r.residual <= probe.tolerance && r.decays;
  if (!r.pass) {
    r.diagnostic = "not regularly varying at this probe";
  }
  return r;
}

RvReport rv_index(const CostFunction& c, const RvProbe& probe) {
  return rv_index(log_of(c), probe, "rv_index " + c.describe());
}

RvReport check_inverse_rv(const CostFunction& c, const RvProbe& probe) {
  const std::string name = "inverse " + c.describe();
  const RvReport base = rv_index(c, probe);
  if (!base.pass) return with_expected(base, 0.0, -1.0);
  if (base.beta <= probe.tolerance) {
    return not_applicable(name, "index 0: inverse is not defined on a range");
  }
  // Probe the inverse over the image of the grid.
  RvProbe inv = probe;
  for (double& y : inv.grid) y = c.eval(y);
  RvReport r = rv_index(
      [&c](double y) { return std::log(inverse_at(c, y)); }, inv, name);
  r = with_expected(r, 1.0 / base.beta, probe.tolerance);
  // The inverse of the inverse is c itself; its index must be 1/beta_inv.
  if (r.pass && std::abs(1.0 / r.beta - base.beta) > probe.tolerance) {
    r.pass = false;
    r.diagnostic = "reciprocal of inverse index does not recover beta";
  }
  return r;
}

RvReport check_scaling_identity(const CostFunction& c, double gamma,
                                const RvProbe& probe) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  const std::string name = "scaling " + c.describe();
  const RvReport base = rv_index(c, probe);
  if (!base.pass) return with_expected(base, 0.0, -1.0);
  if (base.beta <= probe.tolerance) {
    return not_applicable(name, "index 0: inverse is not defined on a range");
  }
  RvReport r;
  r.name = name;
  r.expected = std::pow(gamma, 1.0 / base.beta);
  r.has_expected = true;
  for (double t : probe.grid) {
    const double v = inverse_at(c, gamma * c.eval(t)) / t;
    r.residuals.push_back(std::abs(v / r.expected - 1.0));
    r.beta = v;  // the measured limit at the largest t
  }
  r.residual = r.residuals.back();
  r.decays = true;
  for (std::size_t i = 1; i < r.residuals.size(); ++i) {
    if (!(r.residuals[i] <= r.residuals[i - 1] + kDecayFloor)) r.decays = false;
  }
  r.pass = r.residual <= probe.tolerance && r.decays;
  if (!r.pass) r.diagnostic = "scaled inverse ratio does not settle";
  return r;
}

std::pair<RvReport, RvReport> check_product_and_integral_rv(
    const CostFunction& c, const RvProbe& probe) {
  const RvReport base = rv_index(c, probe);
  RvReport prod = rv_index(
      [&c](double x) { return std::log(x) + c.eval_log(x).log_magnitude(); },
      probe, "product " + c.describe());
  RvReport integ = rv_index(
      [&c](double x) { return std::log(c.primitive(x)); }, probe,
      "integral " + c.describe());
  const double tol = base.pass ? probe.tolerance : -1.0;
  return {with_expected(prod, 1.0 + base.beta, tol),
          with_expected(integ, 1.0 + base.beta, tol)};
}

RvReport check_composition_rv(const CostFunction& c1, const CostFunction& c2,
                              const RvProbe& probe) {
  const RvReport b1 = rv_index(c1, probe);
  const RvReport b2 = rv_index(c2, probe);
  RvReport r = rv_index(
      [&](double x) { return c1.eval_log(c2.eval(x)).log_magnitude(); }, probe,
      "composition " + c1.describe() + " o " + c2.describe());
  const double tol = b1.pass && b2.pass ? probe.tolerance * 10.0 : -1.0;
  return with_expected(r, b1.beta * b2.beta, tol);
}

RvReport check_sum_rv(const CostFunction& c1, const CostFunction& c2,
                      const RvProbe& probe) {
  const RvReport b1 = rv_index(c1, probe);
  const RvReport b2 = rv_index(c2, probe);
  const std::string name = "sum " + c1.describe() + " + " + c2.describe();
  if (!b1.pass || !b2.pass || std::abs(b1.beta - b2.beta) > probe.tolerance) {
    return not_applicable(name, "summands do not share a regular index");
  }
  RvReport r = rv_index(
      [&](double x) { return (c1.eval_log(x) + c2.eval_log(x)).log_magnitude(); },
      probe, name);
  return with_expected(r, b1.beta, probe.tolerance);
}

std::vector<RvReport> rv_suite(const RvProbe& probe) {
  const std::vector<CostFunction> family{
      CostFunction::identity(),
      CostFunction::affine(0.0, 2.0),
      CostFunction::monomial(1.0, 2.0),
      CostFunction::polynomial({0.0, 1.0, 3.0}),
      CostFunction::monomial(1.0, 3.0),
      CostFunction::constant(5.0),
  };
  std::vector<RvReport> out;
  for (const CostFunction& c : family) {
    out.push_back(rv_index(c, probe));
    out.push_back(check_inverse_rv(c, probe));
    out.push_back(check_scaling_identity(c, 4.0, probe));
    auto [prod, integ] = check_product_and_integral_rv(c, probe);
    out.push_back(prod);
    out.push_back(integ);
  }
  // Compositions over a grid small enough that x^2 o x^3 stays finite.
  RvProbe small = probe;
  small.grid = {1e4, 1e5, 1e6, 1e7};
  for (const CostFunction& outer : family) {
    for (const CostFunction& inner : family) {
      out.push_back(check_composition_rv(outer, inner, small));
    }
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i; j < family.size(); ++j) {
      RvReport r = check_sum_rv(family[i], family[j], probe);
      if (r.applicable) out.push_back(std::move(r));
    }
  }
  RvReport detector = rv_index(CostFunction::exp_over_x(), probe);
  detector.name = "non-rv detector " + CostFunction::exp_over_x().describe();
  detector.pass = !detector.pass;
  detector.diagnostic = detector.pass ? "regular variation rejected"
                                      : "e^x/x was accepted as regularly varying";
  out.push_back(std::move(detector));
  return out;
}

}  // namespace poa
