#pragma once

#include <string>
#include <vector>

#include "poa/cost.hpp"
#include "poa/log_value.hpp"
#include "poa/network.hpp"

namespace poa {

/// One candidate of a piecewise optimum search.
struct CandidateRow {
  int j = 0;          // interval / piece index, or a sentinel for endpoints
  std::string kind;   // "left", "interior", "right", "knot", "endpoint"
  double y = 0.0;     // flow on the second link
  LogValue cost;
};

struct OptimumSolution {
  FlowProfile flow;
  double cost = 0.0;  // +inf when only the log form is representable
  LogValue log_cost;
  std::string method;  // marginal | interval-decomposition | candidate-set |
                       // brute-force | conditional-gradient
  std::vector<CandidateRow> certificate;
  int winner = -1;  // index into certificate
  // Period index k with M in (2 a^k, 2 a^{k+1}] for the periodic families.
  int period = 0;
  // Whether the winner lies in the asymptotic candidate set of the family.
  bool claim_holds = true;
  // Optimality residual (KKT gap) where the method has one.
  double residual = 0.0;
  // Brute force only: upper bound on cost - true optimum.
  double resolution_bound = 0.0;
};

enum class OptMethod { kAuto, kMarginal, kStep, kPwl, kExpLog, kBrute, kGeneral };

OptMethod parse_opt_method(const std::string& name);
std::string to_string(OptMethod m);

// Parallel links whose marginal costs are continuous and nondecreasing.
OptimumSolution opt_parallel_marginal(const Network& net, double M);

// c1(x) = x, c2 = StepGeometric(a).
OptimumSolution opt_parallel_step(double a, double M);

// c1(x) = x^2, c2 = PwlSquare(a).
OptimumSolution opt_parallel_pwl_square(double a, double M);

// c1 = ExpOverX, c2 = StepExp(alpha), evaluated in the log domain.
OptimumSolution opt_parallel_exp_log(const AlphaSequence& alpha, double M);

enum class Execution { kSerial, kParallel };

struct BruteForceOptions {
  int resolution = 4001;  // grid points per axis
  int zoom_rounds = 3;
  int zoom_factor = 10;
  // Shifts the interior coarse grid points by jitter * cell width, in [0, 1).
  double jitter = 0.0;
  Execution execution = Execution::kParallel;
};

// Grid search over the simplex for parallel networks with at most 3 links.
OptimumSolution opt_bruteforce(const Network& net, double M,
                               const BruteForceOptions& opts = {});

// Any topology, smooth marginals: pairwise conditional gradient.
OptimumSolution opt_general(const Network& net, double M,
                            double rel_tol = 1e-9, int max_iterations = 100000);

// Dispatch on the instance shape; kAuto picks the exact method if one
// applies, then marginal / general, then brute force.
OptimumSolution optimum(const Network& net, double M,
                        OptMethod method = OptMethod::kAuto);

// Which exact method kAuto would choose.
OptMethod auto_method(const Network& net);

// Instance recognisers used by the dispatcher.
bool is_identity(const CostFunction& c);
bool is_square(const CostFunction& c);

}  // namespace poa
