#include "poa/optimum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "poa/detail/level_solver.hpp"
#include "poa/detail/path_cg.hpp"
#include "poa/errors.hpp"

namespace poa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_demand(double M) {
  if (!(M >= 0.0) || !std::isfinite(M)) {
    throw DomainError("demand M must be nonnegative and finite");
  }
}

void require_base(double a) {
  if (!(a >= 2.0) || !std::isfinite(a)) {
    throw DomainError("base a must satisfy a >= 2");
  }
}

OptimumSolution zero_demand(const Network& net, std::string method) {
  OptimumSolution s;
  s.flow = FlowProfile(std::vector<double>(net.path_count(), 0.0), 0.0);
  s.cost = 0.0;
  s.log_cost = LogValue::zero();
  s.method = std::move(method);
  return s;
}

void set_cost(OptimumSolution& s, const Network& net) {
  s.cost = social_cost(net, s.flow);
  s.log_cost = LogValue::from_double(s.cost);
}

std::size_t argmin_rows(const std::vector<CandidateRow>& rows) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].cost < rows[best].cost) best = i;
  }
  return best;
}

double marginal_gap(const Network& net, const std::vector<double>& x,
                    double M) {
  double used_max = -kInf;
  double all_min = kInf;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Interval m = net.cost(i).marginal(x[i]);
    all_min = std::min(all_min, m.hi);
    if (x[i] > 1e-12 * M) used_max = std::max(used_max, m.lo);
  }
  return std::max(0.0, used_max - all_min) / std::max(1.0, all_min);
}

}  // namespace

OptMethod parse_opt_method(const std::string& name) {
  if (name == "auto") return OptMethod::kAuto;
  if (name == "marginal") return OptMethod::kMarginal;
  if (name == "step") return OptMethod::kStep;
  if (name == "pwl") return OptMethod::kPwl;
  if (name == "exp" || name == "exp_log") return OptMethod::kExpLog;
  if (name == "brute") return OptMethod::kBrute;
  if (name == "general") return OptMethod::kGeneral;
  throw DomainError("unknown optimum method '" + name + "'");
}

std::string to_string(OptMethod m) {
  switch (m) {
    case OptMethod::kAuto: return "auto";
    case OptMethod::kMarginal: return "marginal";
    case OptMethod::kStep: return "step";
    case OptMethod::kPwl: return "pwl";
    case OptMethod::kExpLog: return "exp_log";
    case OptMethod::kBrute: return "brute";
    case OptMethod::kGeneral: return "general";
  }
  return "auto";
}

bool is_identity(const CostFunction& c) {
  if (const auto* f = c.as<family::Affine>()) return f->a == 0.0 && f->b == 1.0;
  if (const auto* f = c.as<family::Monomial>()) {
    return f->coef == 1.0 && f->degree == 1.0;
  }
  if (const auto* f = c.as<family::Polynomial>()) {
    for (std::size_t i = 0; i < f->coeffs.size(); ++i) {
      if (f->coeffs[i] != (i == 1 ? 1.0 : 0.0)) return false;
    }
    return f->coeffs.size() >= 2;
  }
  return false;
}

bool is_square(const CostFunction& c) {
  if (const auto* f = c.as<family::Monomial>()) {
    return f->coef == 1.0 && f->degree == 2.0;
  }
  if (const auto* f = c.as<family::Polynomial>()) {
    for (std::size_t i = 0; i < f->coeffs.size(); ++i) {
      if (f->coeffs[i] != (i == 2 ? 1.0 : 0.0)) return false;
    }
    return f->coeffs.size() >= 3;
  }
  return false;
}

// ---------------------------------------------------------------------------

OptimumSolution opt_parallel_marginal(const Network& net, double M) {
  require_demand(M);
  if (!net.is_parallel()) {
    throw UnsupportedError("opt_parallel_marginal needs a parallel network");
  }
  for (const Edge& e : net.edges()) {
    if (!e.cost.has_continuous_marginal()) {
      throw UnsupportedError("marginal cost of " + e.cost.describe() +
                             " is not continuous; use step, pwl or brute");
    }
  }
  if (M == 0.0) return zero_demand(net, "marginal");
  std::vector<detail::LevelInverse> inverses;
  double mu_lo = kInf;
  double mu_hi = kInf;
  for (const Edge& e : net.edges()) {
    const CostFunction* c = &e.cost;
    inverses.push_back([c](double mu) { return c->marginal_inverse(mu); });
    mu_lo = std::min(mu_lo, c->eval(0.0));
    mu_hi = std::min(mu_hi, c->marginal(M).hi);
  }
  const auto sol = detail::solve_level(inverses, M, mu_lo, std::max(1.0, mu_hi),
                                       0x1p128);
  OptimumSolution s;
  s.flow = FlowProfile(sol.flows, M);
  s.method = "marginal";
  set_cost(s, net);
  s.residual = marginal_gap(net, sol.flows, M);
  return s;
}

// ---------------------------------------------------------------------------

OptimumSolution opt_parallel_step(double a, double M) {
  require_base(a);
  require_demand(M);
  const Network net = Network::parallel(
      {CostFunction::identity(), CostFunction::step_geometric(a)});
  if (M == 0.0) return zero_demand(net, "interval-decomposition");

  OptimumSolution s;
  s.method = "interval-decomposition";
  s.certificate.push_back({0, "endpoint", 0.0, LogValue::from_double(M * M)});
  // I_j = (a^j, a^{j+1}] is feasible while a^j < M.
  const int j_max = geometric_cell(a, M) - 1;
  std::vector<int> js;
  for (int j = j_max - 64; j <= j_max; ++j) {
    const double A = ipow(a, j);
    const double B = ipow(a, j + 1);
    double y = 0.0;
    double c = 0.0;
    std::string kind;
    if (M < A + 0.5 * B) {
      kind = "left";
      y = A;
      c = B * A + (M - A) * (M - A);
    } else if (M <= 1.5 * B) {
      kind = "interior";
      // Keep the rounded point inside the cell (A, B].
      y = std::clamp(M - 0.5 * B, std::nextafter(A, B), B);
      c = B * (M - 0.5 * B) + 0.25 * B * B;
    } else {
      kind = "right";
      y = B;
      c = B * B + (M - B) * (M - B);
    }
    s.certificate.push_back({j, kind, y, LogValue::from_double(c)});
  }
  s.winner = static_cast<int>(argmin_rows(s.certificate));
  const CandidateRow& w = s.certificate[s.winner];
  const double y = std::min(w.y, M);
  s.flow = FlowProfile({M - y, y}, M);
  set_cost(s, net);
  s.period = geometric_cell(a, 0.5 * M) - 1;
  s.claim_holds = w.kind != "endpoint" &&
                  (w.j == s.period - 1 || w.j == s.period);
  return s;
}

// ---------------------------------------------------------------------------

OptimumSolution opt_parallel_pwl_square(double a, double M) {
  require_base(a);
  require_demand(M);
  const CostFunction h = CostFunction::pwl_square(a);
  const Network net = Network::parallel({CostFunction::monomial(1.0, 2.0), h});
  if (M == 0.0) return zero_demand(net, "candidate-set");

  auto objective = [&](double y) {
    const double x = M - y;
    return x * x * x + y * h.eval(y);
  };
  OptimumSolution s;
  s.method = "candidate-set";
  auto add = [&](int j, const char* kind, double y) {
    s.certificate.push_back({j, kind, y, LogValue::from_double(objective(y))});
  };
  add(0, "endpoint", 0.0);
  add(0, "endpoint", M);
  const double la = std::log(a);
  const int k_lo =
      static_cast<int>(std::floor(std::log(std::min(M, M * M)) / la)) - 3;
  const int k_hi = static_cast<int>(std::ceil(std::log(M) / la)) + 1;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double L = ipow(a, k - 1);
    const double U = ipow(a, k);
    if (U < M) add(k, "knot", U);
    if (L >= M) continue;
    // Stationary point of (M-y)^3 + s y^2 - p y: smaller root of
    // 3y^2 - (6M + 2s) y + 3M^2 + p.
    const double sl = L + U;
    const double p = L * U;
    const double B = 6.0 * M + 2.0 * sl;
    const double C = 3.0 * M * M + p;
    const double D = 24.0 * M * sl + 4.0 * sl * sl - 12.0 * p;
    if (D < 0.0) continue;
    const double y = 2.0 * C / (B + std::sqrt(D));
    if (y > L && y < std::min(U, M)) add(k, "interior", y);
  }
  s.winner = static_cast<int>(argmin_rows(s.certificate));
  const double y = s.certificate[s.winner].y;
  s.flow = FlowProfile({M - y, y}, M);
  set_cost(s, net);
  if (y > 0.0 && y < M) {
    const double g = 3.0 * (M - y) * (M - y);
    const Interval m = h.marginal(y);
    s.residual = std::max({0.0, m.lo - g, g - m.hi}) / std::max(1.0, g);
  } else {
    s.residual = marginal_gap(net, {M - y, y}, M);
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

// log(x c(x)) for c = ExpOverX: e x below 1, e^x from 1 on.
LogValue exp_over_x_times_x(double x) {
  if (x <= 0.0) return LogValue::zero();
  if (x < 1.0) return LogValue::from_log(1.0 + std::log(x));
  return LogValue::from_log(x);
}

int exp_period(const AlphaSequence& alpha, double M) {
  int k = 0;
  while (true) {
    if (k + 1 > alpha.last_index()) {
      throw RangeError("demand needs alpha_" + std::to_string(k + 1) +
                       ", beyond the generated sequence");
    }
    if (M <= 2.0 * alpha.at(k + 1)) return k;
    ++k;
  }
}

}  // namespace

OptimumSolution opt_parallel_exp_log(const AlphaSequence& alpha, double M) {
  require_demand(M);
  const CostFunction c = CostFunction::exp_over_x();
  if (M == 0.0) {
    return zero_demand(
        Network::parallel({c, CostFunction::step_exp(alpha)}), "candidate-set");
  }
  OptimumSolution s;
  s.method = "candidate-set";
  s.period = exp_period(alpha, M);
  s.certificate.push_back({0, "endpoint", 0.0, exp_over_x_times_x(M)});
  for (int j = 0; alpha.at(j) < M; ++j) {
    if (j + 1 > alpha.last_index()) {
      throw RangeError("demand needs alpha_" + std::to_string(j + 1) +
                       ", beyond the generated sequence");
    }
    const double A = alpha.at(j);
    const double B = alpha.at(j + 1);
    const LogValue level = c.eval_log(B);
    // x c(x) has derivative e^x, so the stationary x is ln c(B) >= 1.
    const double x_star = std::max(1.0, level.log_magnitude());
    const double hi = std::min(B, M);
    double y = M - x_star;
    std::string kind = "interior";
    if (y <= A) {
      y = A;
      kind = "left";
    } else if (y >= hi) {
      y = hi;
      kind = "right";
    }
    const LogValue cost =
        exp_over_x_times_x(M - y) + LogValue::from_double(y) * level;
    s.certificate.push_back({j, kind, y, cost});
  }
  s.winner = static_cast<int>(argmin_rows(s.certificate));
  const CandidateRow& w = s.certificate[s.winner];
  s.flow = FlowProfile({M - w.y, w.y}, M);
  s.log_cost = w.cost;
  s.cost = w.cost.representable() ? w.cost.to_double() : kInf;
  s.claim_holds = w.kind != "endpoint" && std::abs(w.j - s.period) <= 1;
  return s;
}

// ---------------------------------------------------------------------------

namespace {

double safe_term(const CostFunction& c, double x) {
  if (x <= 0.0) return 0.0;
  try {
    return x * c.eval(x);
  } catch (const RangeError&) {
    return kInf;
  }
}

struct Best {
  double value = kInf;
  std::size_t index = std::numeric_limits<std::size_t>::max();

  void offer(double v, std::size_t i) {
    if (v < value || (v == value && i < index)) {
      value = v;
      index = i;
    }
  }
};

// Minimises f over the point set [0, count) with a deterministic
// (value, index) reduction.
template <typename F>
Best grid_min(std::size_t count, const F& f, Execution exec) {
  Best best;
  if (exec == Execution::kSerial) {
    for (std::size_t i = 0; i < count; ++i) best.offer(f(i), i);
    return best;
  }
#pragma omp parallel
  {
    Best local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
      local.offer(f(static_cast<std::size_t>(i)), static_cast<std::size_t>(i));
    }
#pragma omp critical(poa_grid_min)
    best.offer(local.value, local.index);
  }
  return best;
}

// Uniform points on [lo, hi] plus the given extras inside the window,
// sorted and deduplicated.
std::vector<double> axis(double lo, double hi, int points,
                         const std::vector<double>& extras,
                         double jitter = 0.0) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(points) + 2 + extras.size());
  v.push_back(lo);
  v.push_back(hi);
  for (int i = 0; i < points; ++i) {
    const double t = lo + (hi - lo) * (static_cast<double>(i) + jitter) /
                              static_cast<double>(points - 1);
    if (t < hi) v.push_back(t);
  }
  for (double e : extras) {
    if (e >= lo && e <= hi) v.push_back(e);
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Breakpoints of c as values of the axis variable t, where the link flow is
// t (mirror = false) or M - t (mirror = true), with +-1e-9 M neighbours.
std::vector<double> axis_breaks(const CostFunction& c, double M, bool mirror) {
  std::vector<double> out;
  for (double b : c.breakpoints(0.0, M)) {
    for (double d : {-1e-9 * M, 0.0, 1e-9 * M}) {
      const double x = b + d;
      if (x < 0.0 || x > M) continue;
      out.push_back(mirror ? M - x : x);
    }
  }
  return out;
}

// Jump locations of a discontinuous c in axis coordinates. Every
// discontinuous family is left-continuous, so the jump is met when the link
// flow increases: towards +t, or towards -t for a mirrored axis.
struct Jump {
  double at;
  double side;
};

std::vector<Jump> axis_jumps(const CostFunction& c, double M, bool mirror) {
  std::vector<Jump> out;
  if (c.is_continuous()) return out;
  for (double b : c.breakpoints(0.0, M)) {
    out.push_back(mirror ? Jump{M - b, -1.0} : Jump{b, 1.0});
  }
  return out;
}

// Whether the cost jumps between u and v (excluding the continuous side of
// a jump sitting at u). Such pairs do not bound the cell minimum; the
// +-1e-9 M offsets sample that side instead.
bool straddles(const std::vector<Jump>& jumps, double u, double v) {
  const double lo = std::min(u, v);
  const double hi = std::max(u, v);
  return std::any_of(jumps.begin(), jumps.end(), [&](const Jump& j) {
    if (j.at == u) return (v - u) * j.side > 0.0;
    return j.at >= lo && j.at <= hi;
  });
}

}  // namespace

OptimumSolution opt_bruteforce(const Network& net, double M,
                               const BruteForceOptions& opts) {
  require_demand(M);
  const std::size_t n = net.edge_count();
  if (!net.is_parallel() || n > 3) {
    throw UnsupportedError("brute force needs a parallel network with <= 3 links");
  }
  if (opts.resolution < 3 || opts.zoom_factor < 1 || opts.zoom_rounds < 0 ||
      !(opts.jitter >= 0.0 && opts.jitter < 1.0)) {
    throw DomainError(
        "brute force: resolution >= 3, zoom settings >= 0, jitter in [0, 1)");
  }
  if (M == 0.0) return zero_demand(net, "brute-force");

  const CostFunction& c0 = net.cost(0);
  OptimumSolution s;
  s.method = "brute-force";

  if (n == 1) {
    s.flow = FlowProfile({M}, M);
    set_cost(s, net);
    return s;
  }

  const int zoom_points = 2 * opts.zoom_factor + 1;
  if (n == 2) {
    const CostFunction& c1 = net.cost(1);
    std::vector<double> extras = axis_breaks(c0, M, false);
    const auto e1 = axis_breaks(c1, M, true);
    extras.insert(extras.end(), e1.begin(), e1.end());
    std::vector<Jump> jumps = axis_jumps(c0, M, false);
    const auto j1 = axis_jumps(c1, M, true);
    jumps.insert(jumps.end(), j1.begin(), j1.end());
    auto f = [&](double t) { return safe_term(c0, t) + safe_term(c1, M - t); };

    double h = M / (opts.resolution - 1);
    std::vector<double> grid = axis(0.0, M, opts.resolution, extras, opts.jitter);
    std::size_t best = 0;
    for (int round = 0;; ++round) {
      best = grid_min(
                 grid.size(), [&](std::size_t i) { return f(grid[i]); },
                 opts.execution)
                 .index;
      if (round == opts.zoom_rounds) break;
      const double t = grid[best];
      grid = axis(std::max(0.0, t - h), std::min(M, t + h), zoom_points, extras);
      h /= opts.zoom_factor;
    }
    const double t_best = grid[best];
    const double f_best = f(t_best);
    double change = 0.0;
    for (double t : {t_best - h, t_best + h}) {
      if (t < 0.0 || t > M || straddles(jumps, t_best, t)) continue;
      change = std::max(change, std::abs(f(t) - f_best));
    }
    s.flow = FlowProfile({t_best, M - t_best}, M);
    set_cost(s, net);
    s.resolution_bound = 2.0 * change + 1e-12 * std::abs(f_best);
    return s;
  }

  // n == 3: axes are the flows on links 0 and 1; the third link's
  // breakpoints would be diagonal lines and are not added.
  const CostFunction& c1 = net.cost(1);
  const CostFunction& c2 = net.cost(2);
  const auto ex0 = axis_breaks(c0, M, false);
  const auto ex1 = axis_breaks(c1, M, false);
  const auto jp0 = axis_jumps(c0, M, false);
  const auto jp1 = axis_jumps(c1, M, false);
  auto f = [&](double t0, double t1) {
    const double r = M - t0 - t1;
    if (r < -1e-15 * M) return kInf;
    return safe_term(c0, t0) + safe_term(c1, t1) +
           safe_term(c2, std::max(0.0, r));
  };
  double h = M / (opts.resolution - 1);
  std::vector<double> g0 = axis(0.0, M, opts.resolution, ex0, opts.jitter);
  std::vector<double> g1 = axis(0.0, M, opts.resolution, ex1, opts.jitter);
  std::size_t i0 = 0, i1 = 0;
  for (int round = 0;; ++round) {
    const std::size_t w = g1.size();
    const Best b = grid_min(
        g0.size() * w,
        [&](std::size_t i) { return f(g0[i / w], g1[i % w]); },
        opts.execution);
    i0 = b.index / w;
    i1 = b.index % w;
    if (round == opts.zoom_rounds) break;
    const double t0 = g0[i0];
    const double t1 = g1[i1];
    g0 = axis(std::max(0.0, t0 - h), std::min(M, t0 + h), zoom_points, ex0);
    g1 = axis(std::max(0.0, t1 - h), std::min(M, t1 + h), zoom_points, ex1);
    h /= opts.zoom_factor;
  }
  const double b0 = g0[i0];
  const double b1 = g1[i1];
  const double f_best = f(b0, b1);
  double change = 0.0;
  for (double d : {-h, h}) {
    const double t0 = b0 + d;
    const double t1 = b1 + d;
    if (t0 >= 0.0 && !straddles(jp0, b0, t0)) {
      const double v = f(t0, b1);
      if (std::isfinite(v)) change = std::max(change, std::abs(v - f_best));
    }
    if (t1 >= 0.0 && !straddles(jp1, b1, t1)) {
      const double v = f(b0, t1);
      if (std::isfinite(v)) change = std::max(change, std::abs(v - f_best));
    }
  }
  s.flow = FlowProfile({b0, b1, std::max(0.0, M - b0 - b1)}, M);
  set_cost(s, net);
  s.resolution_bound = 2.0 * change + 1e-12 * std::abs(f_best);
  return s;
}

// ---------------------------------------------------------------------------

OptimumSolution opt_general(const Network& net, double M, double rel_tol,
                            int max_iterations) {
  require_demand(M);
  for (const Edge& e : net.edges()) {
    if (!e.cost.has_continuous_marginal()) {
      throw UnsupportedError("opt_general needs continuous marginal costs; " +
                             e.cost.describe() + " has none");
    }
  }
  if (M == 0.0) return zero_demand(net, "conditional-gradient");
  const auto res = detail::pairwise_conditional_gradient(
      net, M,
      [&](std::size_t e, double x) { return net.cost(e).marginal(x).lo; },
      rel_tol, max_iterations);
  OptimumSolution s;
  s.flow = FlowProfile(res.path_flows, M);
  s.method = "conditional-gradient";
  set_cost(s, net);
  s.residual = res.residual / std::max(1.0, res.level);
  return s;
}

OptMethod auto_method(const Network& net) {
  if (net.is_parallel() && net.edge_count() == 2) {
    const CostFunction& c0 = net.cost(0);
    const CostFunction& c1 = net.cost(1);
    if (is_identity(c0) && c1.as<family::StepGeometric>()) return OptMethod::kStep;
    if (is_square(c0) && c1.as<family::PwlSquare>()) return OptMethod::kPwl;
    if (c0.as<family::ExpOverX>() && c1.as<family::StepExp>()) {
      return OptMethod::kExpLog;
    }
  }
  const bool smooth = std::all_of(
      net.edges().begin(), net.edges().end(),
      [](const Edge& e) { return e.cost.has_continuous_marginal(); });
  if (smooth) return net.is_parallel() ? OptMethod::kMarginal : OptMethod::kGeneral;
  if (net.is_parallel() && net.edge_count() <= 3) return OptMethod::kBrute;
  throw UnsupportedError(
      "no optimum method for non-smooth costs on this network");
}

OptimumSolution optimum(const Network& net, double M, OptMethod method) {
  if (method == OptMethod::kAuto) method = auto_method(net);
  auto require_shape = [&](OptMethod expected) {
    if (auto_method(net) != expected) {
      throw UnsupportedError("instance does not match method " +
                             to_string(expected));
    }
  };
  switch (method) {
    case OptMethod::kMarginal:
      return opt_parallel_marginal(net, M);
    case OptMethod::kStep:
      require_shape(OptMethod::kStep);
      return opt_parallel_step(net.cost(1).as<family::StepGeometric>()->a, M);
    case OptMethod::kPwl:
      require_shape(OptMethod::kPwl);
      return opt_parallel_pwl_square(net.cost(1).as<family::PwlSquare>()->a, M);
    case OptMethod::kExpLog:
      require_shape(OptMethod::kExpLog);
      return opt_parallel_exp_log(*net.cost(1).as<family::StepExp>()->alpha, M);
    case OptMethod::kBrute:
      return opt_bruteforce(net, M);
    case OptMethod::kGeneral:
      return opt_general(net, M);
    case OptMethod::kAuto:
      break;
  }
  throw UnsupportedError("unreachable optimum method");
}

}  // namespace poa
