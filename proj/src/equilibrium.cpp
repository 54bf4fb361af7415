#include "poa/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poa/detail/level_solver.hpp"
#include "poa/detail/path_cg.hpp"
#include "poa/errors.hpp"

namespace poa {

namespace {

void require_positive_demand(double M) {
  if (!(M > 0.0) || !std::isfinite(M)) {
    throw DomainError("demand M must be positive and finite");
  }
}

EquilibriumSolution finish(const Network& net, std::vector<double> flows,
                           double M, double lambda, std::string method,
                           int iterations) {
  EquilibriumSolution s;
  s.flow = FlowProfile(std::move(flows), M);
  s.lambda = lambda;
  s.cost = social_cost(net, s.flow);
  s.residual = verify_equilibrium(net, s.flow, 1e-12).residual;
  s.method = std::move(method);
  s.iterations = iterations;
  return s;
}

}  // namespace

EquilibriumSolution wardrop_parallel(const Network& net, double M,
                                     const EquilibriumOptions& opts) {
  require_positive_demand(M);
  if (!net.is_parallel()) {
    throw UnsupportedError("wardrop_parallel needs a parallel network");
  }
  std::vector<detail::LevelInverse> inverses;
  double lambda_lo = std::numeric_limits<double>::infinity();
  double lambda_hi = std::numeric_limits<double>::infinity();
  for (const Edge& e : net.edges()) {
    const CostFunction* c = &e.cost;
    inverses.push_back([c](double l) { return c->generalized_inverse(l); });
    lambda_lo = std::min(lambda_lo, c->eval(0.0));
    lambda_hi = std::min(lambda_hi, c->eval(M));
  }
  if (!(opts.bracket_scale >= 1.0)) {
    throw DomainError("bracket_scale must be >= 1");
  }
  lambda_hi = std::max(1.0, lambda_hi) * opts.bracket_scale;
  const auto sol = detail::solve_level(inverses, M, lambda_lo, lambda_hi,
                                       opts.level_growth_cap);
  const auto& x = sol.flows;
  // The reported level is the cost actually paid on the used links.
  double lambda = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) lambda = std::max(lambda, net.cost(i).eval(x[i]));
  }
  if (lambda == 0.0) lambda = sol.level;
  return finish(net, sol.flows, M, lambda, "parallel-bisection",
                sol.iterations);
}

EquilibriumSolution wardrop_general(const Network& net, double M,
                                    const EquilibriumOptions& opts) {
  require_positive_demand(M);
  if (!net.all_continuous()) {
    if (net.is_parallel()) return wardrop_parallel(net, M, opts);
    throw UnsupportedError(
        "equilibrium with discontinuous costs is only supported on parallel "
        "networks");
  }
  const auto res = detail::pairwise_conditional_gradient(
      net, M, [&](std::size_t e, double x) { return net.cost(e).eval(x); },
      opts.general_tolerance, opts.max_iterations);
  return finish(net, res.path_flows, M, res.level, "conditional-gradient",
                res.iterations);
}

EquilibriumSolution wardrop(const Network& net, double M,
                            const EquilibriumOptions& opts) {
  return net.is_parallel() ? wardrop_parallel(net, M, opts)
                           : wardrop_general(net, M, opts);
}

LogEquilibrium wardrop_parallel_log(const Network& net, double M) {
  require_positive_demand(M);
  if (!net.is_parallel() || net.edge_count() != 2 ||
      !net.cost(0).as<family::ExpOverX>() ||
      !net.cost(1).as<family::StepExp>()) {
    throw UnsupportedError(
        "wardrop_parallel_log needs links [exp_over_x, step_exp]");
  }
  const AlphaSequence& alpha = *net.cost(1).as<family::StepExp>()->alpha;
  if (!(M > 2.0 * alpha.at(1))) {
    throw DomainError("wardrop_parallel_log needs M > 2 alpha_1");
  }
  int k = 1;
  while (true) {
    if (k + 1 > alpha.last_index()) {
      throw RangeError("demand needs alpha_" + std::to_string(k + 1) +
                       ", beyond the generated sequence");
    }
    if (M <= 2.0 * alpha.at(k + 1)) break;
    ++k;
  }
  LogEquilibrium eq;
  eq.k = k;
  const double ak = alpha.at(k);
  const double ak1 = alpha.at(k + 1);
  eq.left_cell = M <= ak + ak1;
  if (eq.left_cell) {
    eq.y = ak;
    eq.x = M - ak;
  } else {
    eq.x = ak1;
    eq.y = M - ak1;
  }
  eq.lambda = net.cost(0).eval_log(eq.x);
  eq.cost = LogValue::from_double(eq.x) * net.cost(0).eval_log(eq.x) +
            LogValue::from_double(eq.y) * net.cost(1).eval_log(eq.y);
  return eq;
}

ResidualReport verify_equilibrium(const Network& net, const FlowProfile& flow,
                                  double tol) {
  const auto x = edge_flows(net, flow);
  ResidualReport r;
  r.path_costs = path_costs(net, x, false);
  const auto right = path_costs(net, x, true);
  r.min_path_cost = *std::min_element(right.begin(), right.end());
  r.residual = 0.0;
  for (std::size_t p = 0; p < flow.size(); ++p) {
    if (flow[p] > tol * flow.total()) {
      r.residual = std::max(r.residual, r.path_costs[p] - r.min_path_cost);
    }
  }
  r.is_equilibrium = r.residual <= tol;
  return r;
}

}  // namespace poa
