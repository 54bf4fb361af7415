#pragma once

#include <string>
#include <vector>

#include "poa/log_value.hpp"
#include "poa/network.hpp"

namespace poa {

struct EquilibriumOptions {
  // Parallel solver: how far the upper level may grow before the cost is
  // declared unbounded.
  double level_growth_cap = 0x1p128;
  // Multiplies the starting upper level; any value >= 1 gives the same
  // equilibrium cost.
  double bracket_scale = 1.0;
  // General solver stopping rule, relative to max(lambda, 1).
  double general_tolerance = 1e-7;
  int max_iterations = 100000;
};

struct EquilibriumSolution {
  FlowProfile flow;
  double lambda = 0.0;    // common cost of used paths
  double residual = 0.0;  // see verify_equilibrium
  double cost = 0.0;      // WEq = social cost of `flow`
  std::string method;
  int iterations = 0;
};

/// Two-link ExpOverX / StepExp equilibrium with log-domain costs.
struct LogEquilibrium {
  double x = 0.0;  // flow on the ExpOverX link
  double y = 0.0;  // flow on the StepExp link
  int k = 0;       // M in (2 alpha_k, 2 alpha_{k+1}]
  bool left_cell = false;  // M <= alpha_k + alpha_{k+1}
  LogValue lambda;
  LogValue cost;
};

struct ResidualReport {
  double residual = 0.0;
  double min_path_cost = 0.0;
  bool is_equilibrium = false;
  std::vector<double> path_costs;
};

// Parallel links, weakly increasing costs (jumps allowed).
EquilibriumSolution wardrop_parallel(const Network& net, double M,
                                     const EquilibriumOptions& opts = {});

// Any topology with continuous costs; parallel networks with jumps are
// forwarded to wardrop_parallel.
EquilibriumSolution wardrop_general(const Network& net, double M,
                                    const EquilibriumOptions& opts = {});

// Picks wardrop_parallel for parallel networks, wardrop_general otherwise.
EquilibriumSolution wardrop(const Network& net, double M,
                            const EquilibriumOptions& opts = {});

// Network must be [ExpOverX, StepExp]; M > 2 alpha_1.
LogEquilibrium wardrop_parallel_log(const Network& net, double M);

/// Largest gap between a used path and the cheapest path. Costs at jumps
/// are set-valued: a used path is charged its left limit and the cheapest
/// path its right limit, so flows sitting on a jump are not penalised.
/// Paths with flow <= tol * M are treated as unused.
ResidualReport verify_equilibrium(const Network& net, const FlowProfile& flow,
                                  double tol);

}  // namespace poa
