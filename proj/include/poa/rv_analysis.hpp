#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "poa/cost.hpp"

namespace poa {

/// Where and how strictly regular variation is probed.
struct RvProbe {
  std::vector<double> scales{2.0, 3.0, 10.0};
  std::vector<double> grid{1e4, 1e5, 1e6, 1e7, 1e8, 1e9};
  double tolerance = 1e-3;

  // Throws DomainError unless scales > 0 and the grid is strictly increasing.
  void validate() const;
};

// x -> ln f(x); -inf encodes f(x) = 0.
using LogFunction = std::function<double(double)>;

struct RvReport {
  std::string name;
  double beta = 0.0;      // estimated index
  double expected = 0.0;  // index predicted by the closure rule, if any
  bool has_expected = false;
  // max over scales of |f(ax) / (f(x) a^beta) - 1| at each grid point
  std::vector<double> residuals;
  double residual = 0.0;  // max over the upper half of the grid
  bool decays = false;    // residuals non-increasing (up to 1e-12)
  bool pass = false;
  bool applicable = true;
  std::string diagnostic;

  nlohmann::json to_json() const;
};

// Index taken at the largest grid point (median over scales); the residual
// is the worst over the upper half of the grid. Pass needs residual <= tol,
// decaying residuals and, if set, |beta - expected| <= tol.
RvReport rv_index(const LogFunction& log_f, const RvProbe& probe,
                  std::string name = "rv_index");
RvReport rv_index(const CostFunction& c, const RvProbe& probe);

// Index of the numeric inverse is 1/beta; the inverse of the inverse gives
// back beta. Not applicable when beta is 0.
RvReport check_inverse_rv(const CostFunction& c, const RvProbe& probe);

// t -> c^{-1}(gamma c(t)) / t tends to gamma^{1/beta}.
RvReport check_scaling_identity(const CostFunction& c, double gamma,
                                const RvProbe& probe);

// Indices of x c(x) and of the primitive are both 1 + beta.
std::pair<RvReport, RvReport> check_product_and_integral_rv(
    const CostFunction& c, const RvProbe& probe);

// c1 o c2 has index beta1 * beta2.
RvReport check_composition_rv(const CostFunction& c1, const CostFunction& c2,
                              const RvProbe& probe);

// c1 + c2 has the common index beta.
RvReport check_sum_rv(const CostFunction& c1, const CostFunction& c2,
                      const RvProbe& probe);

// Every closure check over {x, 2x, x^2, 3x^2+x, x^3, 5} plus the detector on
// e^x/x, which passes when regular variation is rejected.
std::vector<RvReport> rv_suite(const RvProbe& probe = {});

}  // namespace poa
