#include "poa/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "poa/equilibrium.hpp"
#include "poa/errors.hpp"

namespace poa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHintOffset = 1e-9;

double to_real(const LogValue& v) {
  return v.representable() ? v.to_double() : kInf;
}

PoaValue exp_log_poa(const Network& net, double M) {
  const AlphaSequence& alpha = *net.cost(1).as<family::StepExp>()->alpha;
  PoaValue v;
  v.M = M;
  v.log_domain = true;
  if (M > 2.0 * alpha.at(1)) {
    v.log_weq = wardrop_parallel_log(net, M).cost;
  } else {
    v.log_weq = LogValue::from_double(wardrop_parallel(net, M).cost);
  }
  const OptimumSolution o = opt_parallel_exp_log(alpha, M);
  v.log_opt = o.log_cost;
  v.method = o.method;
  if (v.log_opt.is_zero()) throw DomainError("Opt is 0; PoA undefined");
  v.weq = to_real(v.log_weq);
  v.opt = to_real(v.log_opt);
  v.poa = std::exp(v.log_weq.log_magnitude() - v.log_opt.log_magnitude());
  return v;
}

bool in_last_decade(double M, double M_max) {
  return M >= M_max / 10.0 * (1.0 - 1e-12);
}

void finish_trend(TrendReport& r) {
  if (r.rows.empty()) throw DomainError(r.name + ": empty demand grid");
  const double M_max = r.rows.back().M;
  r.final_poa = r.rows.back().poa;
  r.non_increasing = true;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  const TrendRow* prev = nullptr;
  for (const TrendRow& row : r.rows) {
    if (!in_last_decade(row.M, M_max)) continue;
    if (prev && row.poa > prev->poa * (1.0 + 1e-12)) r.non_increasing = false;
    prev = &row;
    if (row.poa > 1.0) {
      const double x = std::log(row.M);
      const double y = std::log(row.poa - 1.0);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
  }
  if (n >= 2 && n * sxx - sx * sx > 0.0) {
    r.decay_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  const bool rows_ok = std::all_of(r.rows.begin(), r.rows.end(),
                                   [](const TrendRow& t) { return t.ok; });
  r.pass = rows_ok && r.non_increasing && r.final_poa <= 1.0 + r.epsilon;
}

}  // namespace

// ---------------------------------------------------------------------------

PoaValue price_of_anarchy(const Network& net, double M, OptMethod method) {
  if (!(M > 0.0)) throw DomainError("PoA needs M > 0");
  if ((method == OptMethod::kAuto || method == OptMethod::kExpLog) &&
      net.is_parallel() && net.edge_count() == 2 &&
      net.cost(0).as<family::ExpOverX>() && net.cost(1).as<family::StepExp>()) {
    return exp_log_poa(net, M);
  }
  const EquilibriumSolution eq = wardrop(net, M);
  const OptimumSolution opt = optimum(net, M, method);
  if (!(opt.cost > 0.0)) throw DomainError("Opt is 0; PoA undefined");
  PoaValue v;
  v.M = M;
  v.weq = eq.cost;
  v.opt = opt.cost;
  v.poa = eq.cost / opt.cost;
  v.log_weq = LogValue::from_double(eq.cost);
  v.log_opt = LogValue::from_double(opt.cost);
  v.method = opt.method;
  return v;
}

std::vector<double> sweep_grid(const SweepOptions& o) {
  if (!(o.M_lo > 0.0) || !(o.M_hi > o.M_lo)) {
    throw DomainError("sweep needs 0 < M_lo < M_hi");
  }
  if (o.per_decade < 1) throw DomainError("sweep needs per_decade >= 1");
  std::vector<double> g;
  const double span = std::log10(o.M_hi / o.M_lo);
  const auto n = static_cast<long>(std::floor(span * o.per_decade + 1e-9));
  for (long i = 0; i <= n; ++i) {
    g.push_back(o.M_lo * std::pow(10.0, static_cast<double>(i) / o.per_decade));
  }
  g.push_back(o.M_hi);
  for (double h : o.hints) {
    for (double m : {h * (1.0 - kHintOffset), h, h * (1.0 + kHintOffset)}) {
      g.push_back(m);
    }
  }
  std::erase_if(g, [&](double m) { return m < o.M_lo || m > o.M_hi; });
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

std::vector<PeriodExtrema> period_extrema(const std::vector<PoaSample>& samples,
                                          double a, double M_lo, double M_hi) {
  std::map<int, PeriodExtrema> by_k;
  for (const PoaSample& s : samples) {
    if (s.failed) continue;
    const double M = s.value.M;
    const int k = a > 0.0 ? geometric_cell(a, 0.5 * M) - 1
                          : geometric_cell(10.0, M) - 1;
    auto [it, fresh] = by_k.try_emplace(k);
    PeriodExtrema& p = it->second;
    if (fresh) {
      p.k = k;
      p.lo = a > 0.0 ? 2.0 * ipow(a, k) : ipow(10.0, k);
      p.hi = a > 0.0 ? 2.0 * ipow(a, k + 1) : ipow(10.0, k + 1);
      p.complete = p.lo >= M_lo * (1.0 - 1e-12) && p.hi <= M_hi * (1.0 + 1e-12);
      p.min_poa = kInf;
      p.max_poa = -kInf;
    }
    ++p.samples;
    p.min_poa = std::min(p.min_poa, s.value.poa);
    if (s.value.poa > p.max_poa) {
      p.max_poa = s.value.poa;
      p.argmax = M;
    }
  }
  std::vector<PeriodExtrema> out;
  for (auto& [k, p] : by_k) out.push_back(p);
  return out;
}

PoaCurve poa_sweep(const Network& net, const SweepOptions& opts) {
  const std::vector<double> grid = sweep_grid(opts);
  PoaCurve curve;
  curve.period_base = opts.period_base;
  curve.breakpoints = opts.hints;
  curve.samples.resize(grid.size());
  auto run = [&](std::size_t i) {
    PoaSample& s = curve.samples[i];
    try {
      s.value = price_of_anarchy(net, grid[i], opts.method);
    } catch (const std::exception& e) {
      s.failed = true;
      s.flag = e.what();
      s.value.M = grid[i];
    }
  };
  if (opts.execution == Execution::kSerial) {
    for (std::size_t i = 0; i < grid.size(); ++i) run(i);
  } else {
#ifdef _OPENMP
    const int jobs = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();
#else
    const int jobs = 1;
#endif
#pragma omp parallel for schedule(dynamic, 8) num_threads(jobs)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.size()); ++i) {
      run(static_cast<std::size_t>(i));
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (curve.samples[i].failed) curve.failures.push_back(i);
  }
  curve.periods =
      period_extrema(curve.samples, opts.period_base, opts.M_lo, opts.M_hi);
  return curve;
}

std::vector<double> step_breakpoints(double a, double M_lo, double M_hi) {
  if (!(a >= 2.0)) throw DomainError("base a must satisfy a >= 2");
  const double alpha = 1.0 + a / 2.0;
  const double beta = alpha + std::sqrt(a - 1.0);
  const double gamma = 1.5 * a;
  std::vector<double> out;
  const int k_lo = geometric_cell(a, M_lo / (2.0 * a)) - 1;
  const int k_hi = geometric_cell(a, M_hi) + 1;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double A = ipow(a, k);
    for (double f : {1.0, 2.0, alpha, beta, 1.0 + a, gamma}) {
      const double m = f * A;
      if (m >= M_lo && m <= M_hi) out.push_back(m);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

nlohmann::json Extremes::to_json() const {
  return {{"liminf", liminf},       {"limsup", limsup},
          {"stability", stability}, {"accepted", accepted},
          {"periods", periods}};
}

Extremes extremes_estimate(const PoaCurve& curve, int periods_required,
                           double stability_tol) {
  std::vector<const PeriodExtrema*> full;
  for (const PeriodExtrema& p : curve.periods) {
    if (p.complete && p.samples > 0) full.push_back(&p);
  }
  if (static_cast<int>(full.size()) < periods_required) {
    throw DomainError("curve covers " + std::to_string(full.size()) +
                      " full periods, " + std::to_string(periods_required) +
                      " required");
  }
  Extremes e;
  e.liminf = -kInf;
  e.limsup = kInf;
  double max_hi = -kInf, min_lo = kInf;
  for (const PeriodExtrema* p : full) {
    e.liminf = std::max(e.liminf, p->min_poa);
    e.limsup = std::min(e.limsup, p->max_poa);
    max_hi = std::max(max_hi, p->max_poa);
    min_lo = std::min(min_lo, p->min_poa);
    e.periods.push_back(p->k);
  }
  e.stability = std::max((max_hi - e.limsup) / e.limsup,
                         (e.liminf - min_lo) / e.liminf);
  e.accepted = e.stability <= stability_tol;
  return e;
}

// ---------------------------------------------------------------------------

double thm5_limsup(double a) { return (4.0 + 4.0 * a) / (4.0 + 3.0 * a); }

Thm5Value thm5_closed_form(double a, double M) {
  if (!(a >= 2.0)) throw DomainError("base a must satisfy a >= 2");
  if (!(M > 0.0)) throw DomainError("demand M must be positive");
  Thm5Value v;
  v.k = geometric_cell(a, 0.5 * M) - 1;
  const double A = ipow(a, v.k);
  const double B = a * A;
  v.z = M / A;
  const double beta = 1.0 + a / 2.0 + std::sqrt(a - 1.0);
  const double gamma = 1.5 * a;

  v.weq = v.z <= 1.0 + a ? (M - A) * (M - A) + A * A : M * B;
  if (v.z < beta) {
    v.opt = A * A + (M - A) * (M - A);
  } else if (v.z <= gamma) {
    v.opt = B * (M - B / 4.0);
  } else {
    v.opt = B * B + (M - B) * (M - B);
  }
  v.region = v.z < beta ? 0 : v.z <= 1.0 + a ? 1 : v.z <= gamma ? 2 : 3;
  v.poa = v.weq / v.opt;
  return v;
}

Thm6Constants thm6_constants(double a) {
  if (!(a >= 2.0)) throw DomainError("base a must satisfy a >= 2");
  Thm6Constants t;
  t.b = std::sqrt((2.0 * a * a + a) / 3.0);
  t.c = 0.5 * (std::sqrt((a + 1.0) * (a + 1.0) + 4.0 * a * a +
                         4.0 * (a + 1.0) * t.b) -
               (a + 1.0));
  t.d = a + t.b - t.c;
  if (!(1.0 < t.d && t.d < a)) {
    throw DomainError("constant d = " + std::to_string(t.d) +
                      " violates 1 < d < a");
  }
  t.M1 = a + t.b;
  t.poa = (t.c * t.c * t.c + (a + 1.0) * t.d * t.d - a * t.d) /
          (t.b * t.b * t.b + a * a * a);
  return t;
}

double thm6_demand(double a, int k) {
  return ipow(a, k - 1) * (a + thm6_constants(a).b);
}

Thm7Value thm7_poa_near_breakpoint(const AlphaSequence& alpha, int k,
                                   double offset) {
  if (k < 1) throw DomainError("k must be >= 1");
  if (k + 2 > alpha.last_index()) {
    throw RangeError("alpha sequence too short: need alpha_" +
                     std::to_string(k + 2));
  }
  Thm7Value v;
  v.k = k;
  const double ak = alpha.at(k);
  const double ak1 = alpha.at(k + 1);
  v.closed_form = (ak + ak1) / (1.0 + ak + std::log(ak1));
  v.M = (ak + ak1) * (1.0 + offset);
  const Network net = Network::parallel(
      {CostFunction::exp_over_x(), CostFunction::step_exp(alpha)});
  const LogEquilibrium eq = wardrop_parallel_log(net, v.M);
  const OptimumSolution opt = opt_parallel_exp_log(alpha, v.M);
  v.numeric = std::exp(eq.cost.log_magnitude() - opt.log_cost.log_magnitude());
  v.claim_holds = opt.claim_holds;
  return v;
}

// ---------------------------------------------------------------------------

nlohmann::json TrendReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const TrendRow& r : rows) {
    rows_json.push_back({{"M", r.M}, {"poa", r.poa}, {"extra", r.extra},
                         {"ok", r.ok}});
  }
  nlohmann::json j{{"name", name},
                   {"final_poa", final_poa},
                   {"non_increasing", non_increasing},
                   {"decay_exponent", decay_exponent},
                   {"epsilon", epsilon},
                   {"pass", pass},
                   {"rows", rows_json}};
  if (!note.empty()) j["note"] = note;
  return j;
}

std::vector<double> decade_grid(double from_exp, double to_exp,
                                int per_decade) {
  if (!(to_exp > from_exp) || per_decade < 1) {
    throw DomainError("decade grid needs from < to and per_decade >= 1");
  }
  std::vector<double> g;
  const auto n = static_cast<long>(
      std::llround((to_exp - from_exp) * per_decade));
  for (long i = 0; i <= n; ++i) {
    g.push_back(std::pow(10.0, from_exp + static_cast<double>(i) / per_decade));
  }
  return g;
}

TrendReport bounded_path_experiment(const Network& net,
                                    const std::vector<double>& M_grid,
                                    double epsilon) {
  double B = kInf;
  for (const auto& path : net.paths()) {
    double sum = 0.0;
    for (std::size_t e : path) sum += net.cost(e).asymptotic_value();
    B = std::min(B, sum);
  }
  if (!std::isfinite(B)) {
    throw DomainError("bounded path experiment needs a path of bounded cost");
  }
  TrendReport r;
  r.name = "bounded-path";
  r.epsilon = epsilon;
  r.note = "B = " + std::to_string(B);
  for (double M : M_grid) {
    const PoaValue v = price_of_anarchy(net, M);
    const double bound = M * B / v.opt;
    r.rows.push_back({M, v.poa, bound, v.poa <= bound * (1.0 + 1e-12)});
  }
  finish_trend(r);
  return r;
}

TrendReport shift_experiment(const Network& base,
                             const std::vector<double>& shifts,
                             const std::vector<double>& M_grid,
                             double epsilon) {
  if (shifts.size() != base.edge_count()) {
    throw DomainError("one shift per edge required");
  }
  std::vector<Edge> edges = base.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!(shifts[i] >= 0.0)) throw DomainError("shifts must be >= 0");
    edges[i].cost = CostFunction::shifted(edges[i].cost, shifts[i]);
  }
  const Network shifted(base.vertices(), edges, base.source(), base.sink());
  const double a_max = *std::max_element(shifts.begin(), shifts.end());
  const double a_min = *std::min_element(shifts.begin(), shifts.end());

  TrendReport r;
  r.name = "shift";
  r.epsilon = epsilon;
  double base_final = 0.0;
  for (double M : M_grid) {
    const double lambda = wardrop(base, M).lambda;
    const double lambda_a = wardrop(shifted, M).lambda;
    const double tol = 1e-9 * std::max(1.0, lambda_a);
    const bool sandwich =
        lambda_a - a_max - tol <= lambda && lambda <= lambda_a - a_min + tol;
    r.rows.push_back({M, price_of_anarchy(shifted, M).poa, lambda_a, sandwich});
    base_final = price_of_anarchy(base, M).poa;
  }
  r.note = "base PoA at largest M = " + std::to_string(base_final);
  finish_trend(r);
  if (base_final > 1.0 + epsilon) {
    r.pass = false;
    r.note += " (base instance does not approach 1)";
  }
  return r;
}

std::string to_string(RvHypothesis h) {
  switch (h) {
    case RvHypothesis::kLinearGrowth: return "linear-growth";
    case RvHypothesis::kDerivativeLimit: return "derivative-limit";
    case RvHypothesis::kCommonRv: return "common-rv";
    case RvHypothesis::kInverseRatio: return "inverse-ratio";
    case RvHypothesis::kAffineSandwich: return "affine-sandwich";
  }
  return "unknown";
}

TrendReport rv_poa_experiment(const Network& net, RvHypothesis hypothesis,
                              const std::vector<double>& M_grid,
                              const CostFunction* reference, double epsilon,
                              std::vector<HypothesisEstimate>* estimates) {
  const bool needs_ref = hypothesis == RvHypothesis::kCommonRv ||
                         hypothesis == RvHypothesis::kInverseRatio;
  if (needs_ref && reference == nullptr) {
    throw DomainError(to_string(hypothesis) + " needs a reference cost");
  }
  auto measure = [&](const CostFunction& c, double x) {
    switch (hypothesis) {
      case RvHypothesis::kDerivativeLimit: {
        const Interval d = c.derivative_sides(x);
        return 0.5 * (d.lo + d.hi);
      }
      case RvHypothesis::kCommonRv:
        return c.eval(x) / reference->eval(x);
      case RvHypothesis::kInverseRatio:
        return reference->generalized_inverse(c.eval(x)).lo / x;
      case RvHypothesis::kLinearGrowth:
      case RvHypothesis::kAffineSandwich:
        break;
    }
    return c.eval(x) / x;
  };

  TrendReport r;
  r.name = to_string(hypothesis);
  r.epsilon = epsilon;
  std::vector<HypothesisEstimate> est;
  bool all_converged = true;
  bool any_finite = false;
  for (const Edge& e : net.edges()) {
    const double prev = measure(e.cost, 1e8);
    const double last = measure(e.cost, 1e9);
    HypothesisEstimate h;
    if (last > 1e3 && last >= 2.0 * prev) {
      h.value = kInf;
      h.converged = true;
    } else {
      h.value = last;
      h.converged = std::abs(last - prev) <= 1e-3 * std::max(1.0, std::abs(last));
      any_finite = any_finite || h.converged;
    }
    all_converged = all_converged && h.converged;
    est.push_back(h);
  }
  std::string note = "limits:";
  for (const HypothesisEstimate& h : est) note += " " + std::to_string(h.value);
  r.note = note;
  for (double M : M_grid) r.rows.push_back({M, price_of_anarchy(net, M).poa, 0.0, true});
  finish_trend(r);
  if (!all_converged || !any_finite) {
    r.pass = false;
    r.note += " (hypothesis limits not established)";
  }
  if (estimates) *estimates = std::move(est);
  return r;
}

}  // namespace poa
