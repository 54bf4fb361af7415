#pragma once

#include <functional>
#include <vector>

#include "poa/network.hpp"

namespace poa::detail {

// Per-edge gradient of a separable convex objective: c_e for the
// equilibrium potential, the marginal cost for the social cost.
using EdgeGradient = std::function<double(std::size_t edge, double flow)>;

struct PathCgResult {
  std::vector<double> path_flows;
  double level = 0.0;     // cheapest path gradient at the solution
  double residual = 0.0;  // worst used path minus cheapest path
  int iterations = 0;
};

// Pairwise conditional gradient over the path simplex: each step moves flow
// from the most expensive used path to the cheapest path with an exact line
// search. Stops once residual <= rel_tol * max(level, 1); throws
// ConvergenceError after max_iterations.
PathCgResult pairwise_conditional_gradient(const Network& net, double M,
                                           const EdgeGradient& gradient,
                                           double rel_tol, int max_iterations);

}  // namespace poa::detail
