#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "poa/log_value.hpp"
#include "poa/network.hpp"
#include "poa/optimum.hpp"

namespace poa {

struct PoaValue {
  double M = 0.0;
  double weq = 0.0;  // +inf when only the log form is representable
  double opt = 0.0;
  double poa = 0.0;
  LogValue log_weq;
  LogValue log_opt;
  bool log_domain = false;
  std::string method;  // optimum method tag
};

// WEq / Opt with method routing; the exp/step-exp instance is solved in the
// log domain. Throws DomainError when Opt = 0.
PoaValue price_of_anarchy(const Network& net, double M, OptMethod method = OptMethod::kAuto);

struct PoaSample {
  PoaValue value;
  bool failed = false;
  std::string flag;  // error text for failed samples
};

struct PeriodExtrema {
  int k = 0;
  double lo = 0.0;  // window (lo, hi]
  double hi = 0.0;
  double min_poa = 0.0;
  double max_poa = 0.0;
  double argmax = 0.0;
  std::size_t samples = 0;
  bool complete = false;  // window lies inside the swept range
};

struct PoaCurve {
  std::vector<PoaSample> samples;  // M strictly increasing
  std::vector<double> breakpoints;
  std::vector<PeriodExtrema> periods;
  double period_base = 0.0;  // a for windows (2a^k, 2a^{k+1}], 0 for decades
  std::vector<std::size_t> failures;
};

struct SweepOptions {
  double M_lo = 1.0;
  double M_hi = 10.0;
  int per_decade = 512;
  std::vector<double> hints;  // sampled at h and h(1 +- 1e-9)
  double period_base = 0.0;
  OptMethod method = OptMethod::kAuto;
  Execution execution = Execution::kParallel;
  int jobs = 0;  // 0: OpenMP default
};

PoaCurve poa_sweep(const Network& net, const SweepOptions& opts);

// Sorted sample grid of a sweep: geometric points, the endpoints and the
// hints with their offsets, restricted to [M_lo, M_hi].
std::vector<double> sweep_grid(const SweepOptions& opts);

// Per-period extrema of the samples, windows (2a^k, 2a^{k+1}] when a > 0,
// decades (10^k, 10^{k+1}] otherwise.
std::vector<PeriodExtrema> period_extrema(const std::vector<PoaSample>& samples,
                                          double period_base, double M_lo,
                                          double M_hi);

// Region boundaries of the step instance in (2a^k, 2a^{k+1}]:
// a^k, 2a^k, alpha a^k, beta a^k, (1+a) a^k, gamma a^k.
std::vector<double> step_breakpoints(double a, double M_lo, double M_hi);

struct Extremes {
  double liminf = 0.0;  // max over periods of the period minimum
  double limsup = 0.0;  // min over periods of the period maximum
  double stability = 0.0;
  bool accepted = false;
  std::vector<int> periods;

  nlohmann::json to_json() const;
};

// Uses complete periods only; throws DomainError with fewer than
// periods_required of them.
Extremes extremes_estimate(const PoaCurve& curve, int periods_required = 3,
                           double stability_tol = 1e-3);

struct Thm5Value {
  double weq = 0.0;
  double opt = 0.0;
  double poa = 0.0;
  int k = 0;       // M in (2a^k, 2a^{k+1}]
  double z = 0.0;  // M / a^k
  int region = 0;  // 0: z < beta, 1: [beta, 1+a], 2: (1+a, gamma], 3: > gamma
};

// Exact piecewise WEq, Opt and PoA of x vs StepGeometric(a).
Thm5Value thm5_closed_form(double a, double M);
double thm5_limsup(double a);  // (4 + 4a) / (4 + 3a)

struct Thm6Constants {
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double M1 = 0.0;
  double poa = 0.0;
};

// Throws DomainError when 1 < d < a fails.
Thm6Constants thm6_constants(double a);
// a^{k-1} (a + b)
double thm6_demand(double a, int k);

struct Thm7Value {
  int k = 0;
  double M = 0.0;
  double closed_form = 0.0;
  double numeric = 0.0;  // log-domain pipeline at M
  bool claim_holds = true;
};

// Closed form near alpha_k + alpha_{k+1} and the numeric PoA at
// M = (alpha_k + alpha_{k+1})(1 + offset). Needs alpha_{k+2}.
Thm7Value thm7_poa_near_breakpoint(const AlphaSequence& alpha, int k,
                                   double offset = 1e-6);

struct TrendRow {
  double M = 0.0;
  double poa = 0.0;
  double extra = 0.0;  // experiment specific (bound, lambda, ...)
  bool ok = true;      // experiment specific per-sample check
};

struct TrendReport {
  std::string name;
  std::vector<TrendRow> rows;
  double final_poa = 0.0;
  bool non_increasing = false;  // over the last decade of the grid
  double decay_exponent = 0.0;  // slope of ln(PoA - 1) against ln M
  double epsilon = 1e-2;
  bool pass = false;
  std::string note;

  nlohmann::json to_json() const;
};

// Geometric grid 10^from .. 10^to with n points per decade.
std::vector<double> decade_grid(double from_exp, double to_exp, int per_decade);

// Paths with bounded asymptotic cost; extra = M B / Opt.
TrendReport bounded_path_experiment(const Network& net,
                                    const std::vector<double>& M_grid,
                                    double epsilon = 1e-2);

// Adds shifts[i] to link i; extra = lambda of the shifted game, ok = the
// lambda sandwich lambda^a - max a <= lambda <= lambda^a - min a.
TrendReport shift_experiment(const Network& base,
                             const std::vector<double>& shifts,
                             const std::vector<double>& M_grid,
                             double epsilon = 1e-2);

enum class RvHypothesis {
  kLinearGrowth,     // c_i(x) / x -> m_i
  kDerivativeLimit,  // c_i'(x) -> m_i
  kCommonRv,         // c_i(x) / c(x) -> m_i
  kInverseRatio,     // c^{-1}(c_i(x)) / x -> alpha_i
  kAffineSandwich,   // a_i + m_i x <= c_i(x) <= a_i' + m_i x
};

std::string to_string(RvHypothesis h);

struct HypothesisEstimate {
  double value = 0.0;  // +inf when diverging
  bool converged = false;
};

// Checks the hypothesis limits on 1e4..1e9, then the PoA trend.
// `reference` is used by kCommonRv and kInverseRatio.
TrendReport rv_poa_experiment(const Network& net, RvHypothesis hypothesis,
                              const std::vector<double>& M_grid,
                              const CostFunction* reference = nullptr,
                              double epsilon = 1e-2,
                              std::vector<HypothesisEstimate>* estimates = nullptr);

}  // namespace poa
