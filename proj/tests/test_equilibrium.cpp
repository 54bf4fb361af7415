#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "poa/equilibrium.hpp"
#include "poa/errors.hpp"

using namespace poa;

namespace {

Network pigou() {
  return Network::parallel({CostFunction::identity(), CostFunction::constant(1.0)});
}

Network step(double a) {
  return Network::parallel({CostFunction::identity(), CostFunction::step_geometric(a)});
}

// Random continuous, strictly increasing two- or three-link instance.
Network random_smooth(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_int_distribution<int> links(2, 3);
  std::vector<CostFunction> cs;
  const int n = links(rng);
  for (int i = 0; i < n; ++i) {
    switch (pick(rng)) {
      case 0: cs.push_back(CostFunction::affine(u(rng), 0.1 + u(rng))); break;
      case 1: cs.push_back(CostFunction::monomial(0.1 + u(rng), 0.5 + u(rng))); break;
      case 2: cs.push_back(CostFunction::polynomial({u(rng), u(rng), 0.1 + u(rng)})); break;
      default: cs.push_back(CostFunction::saturating(u(rng), 0.1 + u(rng), u(rng), 1.0 + u(rng)));
    }
  }
  return Network::parallel(cs);
}

// Independent oracle for a two-link game with continuous increasing costs:
// bisection on the split where c1(x) - c2(M - x) changes sign.
double two_link_split(const Network& net, double M) {
  const auto& c1 = net.cost(0);
  const auto& c2 = net.cost(1);
  if (c1.eval(M) <= c2.eval(0.0)) return M;
  if (c2.eval(M) <= c1.eval(0.0)) return 0.0;
  return oracle::bisect([&](double x) { return c1.eval(x) - c2.eval(M - x); }, 0.0, M);
}

}  // namespace

TEST(WardropParallel, Pigou) {
  const auto s = wardrop_parallel(pigou(), 1.0);
  EXPECT_EQ(s.flow[0], 1.0);
  EXPECT_EQ(s.flow[1], 0.0);
  EXPECT_EQ(s.lambda, 1.0);
  EXPECT_EQ(s.cost, 1.0);
  // No other split is an equilibrium: any flow on link 2 sees cost 1 while
  // link 1 costs less than 1.
  for (int i = 1; i <= 100; ++i) {
    const double y = i / 100.0;
    EXPECT_GT(verify_equilibrium(pigou(), FlowProfile({1.0 - y, y}, 1.0), 1e-12).residual, 0.0);
  }
}

TEST(WardropParallel, StepGameCases) {
  const auto left = wardrop_parallel(step(2.0), 5.0);
  EXPECT_NEAR(left.flow[0], 3.0, 1e-12);
  EXPECT_NEAR(left.flow[1], 2.0, 1e-12);
  EXPECT_NEAR(left.cost, 13.0, 1e-11);
  const auto right = wardrop_parallel(step(2.0), 7.0);
  EXPECT_NEAR(right.flow[0], 4.0, 1e-12);
  EXPECT_NEAR(right.flow[1], 3.0, 1e-12);
  EXPECT_NEAR(right.cost, 28.0, 1e-11);
}

TEST(WardropParallel, Symmetric) {
  const auto s = wardrop_parallel(
      Network::parallel({CostFunction::identity(), CostFunction::identity()}), 2.0);
  EXPECT_NEAR(s.flow[0], 1.0, 1e-15);
  EXPECT_NEAR(s.flow[1], 1.0, 1e-15);
}

TEST(WardropParallel, Errors) {
  EXPECT_THROW(wardrop_parallel(pigou(), 0.0), DomainError);
  EXPECT_THROW(wardrop_parallel(pigou(), -1.0), DomainError);
}

TEST(WardropParallel, MatchesTwoLinkOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> logM(-3.0, 6.0);
  for (int i = 0; i < 300; ++i) {
    const auto base = random_smooth(rng);
    const auto net = Network::parallel({base.cost(0), base.cost(1)});
    const double M = std::pow(10.0, logM(rng));
    const auto s = wardrop_parallel(net, M);
    const double x = two_link_split(net, M);
    EXPECT_NEAR(s.flow[0], x, 1e-9 * M) << net.cost(0).describe() << " " << net.cost(1).describe() << " M=" << M;
  }
}

TEST(WardropGeneral, AgreesWithParallelSolver) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> logM(-2.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const auto net = random_smooth(rng);
    const double M = std::pow(10.0, logM(rng));
    const auto a = wardrop_parallel(net, M);
    const auto b = wardrop_general(net, M);
    const auto ca = path_costs(net, edge_flows(net, a.flow));
    const auto cb = path_costs(net, edge_flows(net, b.flow));
    for (std::size_t p = 0; p < ca.size(); ++p) {
      EXPECT_NEAR(ca[p], cb[p], 1e-6 * std::max(1.0, ca[p]));
    }
    EXPECT_LE(b.residual, 1e-7 * std::max(1.0, b.lambda));
  }
}

TEST(WardropGeneral, SeriesPathsReduceToParallel) {
  // Path 1: s-a-t with costs x and x; path 2: s-b-t with constant 1 twice.
  const Network net({"s", "a", "b", "t"},
                    {{"sa", "s", "a", CostFunction::identity()},
                     {"at", "a", "t", CostFunction::identity()},
                     {"sb", "s", "b", CostFunction::constant(1.0)},
                     {"bt", "b", "t", CostFunction::constant(1.0)}},
                    "s", "t");
  ASSERT_EQ(net.path_count(), 2u);
  for (double M : {0.5, 1.0, 3.0, 10.0}) {
    const auto s = wardrop_general(net, M);
    const double x = std::min(M, 1.0);  // 2x = 2 at x = 1
    const std::size_t p1 = net.paths()[0][0] == 0 ? 0 : 1;
    EXPECT_NEAR(s.flow[p1], x, 1e-7 * M) << M;
  }
}

TEST(WardropGeneral, SinglePath) {
  const Network net({"s", "v", "t"},
                    {{"a", "s", "v", CostFunction::affine(1.0, 2.0)},
                     {"b", "v", "t", CostFunction::identity()}},
                    "s", "t");
  const auto s = wardrop_general(net, 4.0);
  EXPECT_EQ(s.flow[0], 4.0);
  EXPECT_DOUBLE_EQ(s.lambda, 9.0 + 4.0);
}

TEST(WardropGeneral, DiscontinuousCosts) {
  EXPECT_NEAR(wardrop_general(step(2.0), 5.0).cost, 13.0, 1e-11);  // routed to parallel
  const Network net({"s", "v", "t"},
                    {{"a", "s", "v", CostFunction::step_geometric(2.0)},
                     {"b", "v", "t", CostFunction::identity()},
                     {"c", "s", "t", CostFunction::identity()}},
                    "s", "t");
  EXPECT_THROW(wardrop_general(net, 1.0), UnsupportedError);
}

TEST(WardropGeneral, IterationCap) {
  const auto net = Network::parallel({CostFunction::identity(), CostFunction::monomial(1.0, 2.0),
                                      CostFunction::affine(0.5, 3.0)});
  EquilibriumOptions o;
  o.max_iterations = 1;
  try {
    wardrop_general(net, 10.0, o);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(WardropLog, FactorialRightCell) {
  const auto net = Network::parallel(
      {CostFunction::exp_over_x(), CostFunction::step_exp(AlphaSequence::factorial(10))});
  const auto eq = wardrop_parallel_log(net, 31.0);
  EXPECT_EQ(eq.k, 3);
  EXPECT_FALSE(eq.left_cell);
  EXPECT_EQ(eq.x, 24.0);
  EXPECT_EQ(eq.y, 7.0);
  EXPECT_NEAR(eq.cost.log_magnitude(), std::log(31.0) + 24.0 - std::log(24.0), 1e-12);
}

TEST(WardropLog, LeftCellAndErrors) {
  const auto alpha = AlphaSequence::factorial(10);
  const auto net = Network::parallel({CostFunction::exp_over_x(), CostFunction::step_exp(alpha)});
  const auto eq = wardrop_parallel_log(net, 2.0 * 24.0 + 1e-6);
  EXPECT_TRUE(eq.left_cell);
  EXPECT_EQ(eq.y, 24.0);
  EXPECT_THROW(wardrop_parallel_log(net, 2.0), DomainError);
  const auto short_net = Network::parallel(
      {CostFunction::exp_over_x(), CostFunction::step_exp(AlphaSequence::explicit_values({1.0}))});
  EXPECT_THROW(wardrop_parallel_log(short_net, 5.0), RangeError);
  EXPECT_THROW(wardrop_parallel_log(net, 1e9), RangeError);
  EXPECT_THROW(wardrop_parallel_log(pigou(), 5.0), UnsupportedError);
}

TEST(WardropLog, AgreesWithLinearSolverWhereRepresentable) {
  const auto alpha = AlphaSequence::explicit_values({1.0, 3.0, 30.0, 90.0, 300.0, 1000.0});
  const auto net = Network::parallel({CostFunction::exp_over_x(), CostFunction::step_exp(alpha)});
  for (double M : {6.5, 20.0, 33.5, 40.0, 59.0, 61.0, 100.0}) {
    const auto a = wardrop_parallel_log(net, M);
    const auto b = wardrop_parallel(net, M);
    EXPECT_NEAR(a.cost.to_double() / b.cost, 1.0, 1e-9) << M;
  }
}

TEST(VerifyEquilibrium, Residuals) {
  const auto net = pigou();
  EXPECT_EQ(verify_equilibrium(net, FlowProfile({1.0, 0.0}, 1.0), 1e-9).residual, 0.0);
  const auto half = verify_equilibrium(net, FlowProfile({0.5, 0.5}, 1.0), 1e-9);
  EXPECT_EQ(half.residual, 0.5);
  EXPECT_FALSE(half.is_equilibrium);
  const auto expensive = Network::parallel({CostFunction::identity(), CostFunction::constant(100.0)});
  EXPECT_EQ(verify_equilibrium(expensive, FlowProfile({1.0, 0.0}, 1.0), 1e-9).residual, 0.0);
}

// ---- properties ------------------------------------------------------------

TEST(EquilibriumProperties, FeasibleWithSmallResidual) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> logM(-3.0, 7.0);
  for (int i = 0; i < 300; ++i) {
    const auto net = i % 3 == 0 ? step(2.0 + i % 4) : random_smooth(rng);
    const double M = std::pow(10.0, logM(rng));
    const auto s = wardrop(net, M);
    double sum = 0.0;
    for (double f : s.flow.path_flows()) sum += f;
    EXPECT_NEAR(sum, M, 1e-12 * M);
    EXPECT_LE(s.residual, 1e-9 * std::max(1.0, s.lambda));
    EXPECT_NEAR(s.cost, social_cost(net, s.flow), 1e-12 * s.cost);
  }
}

TEST(EquilibriumProperties, CostIndependentOfBracket) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> logM(-2.0, 6.0);
  EquilibriumOptions wide;
  wide.bracket_scale = 1e6;
  for (int i = 0; i < 200; ++i) {
    const auto net = i % 2 == 0 ? step(3.0) : random_smooth(rng);
    const double M = std::pow(10.0, logM(rng));
    const double a = wardrop_parallel(net, M).cost;
    const double b = wardrop_parallel(net, M, wide).cost;
    EXPECT_NEAR(a, b, 1e-9 * a);
  }
}

TEST(EquilibriumProperties, LevelIncreasesWithDemand) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 20; ++i) {
    const auto net = i % 2 == 0 ? step(2.0) : random_smooth(rng);
    double prev = 0.0;
    for (double M = 0.01; M < 1e4; M *= 1.1) {
      const double l = wardrop(net, M).lambda;
      EXPECT_GE(l, prev * (1.0 - 1e-12));
      prev = l;
    }
  }
}

TEST(EquilibriumProperties, EqualShiftRaisesLevelOnly) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> logM(-2.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const auto net = random_smooth(rng);
    std::vector<CostFunction> shifted;
    for (const auto& c : net.costs()) shifted.push_back(CostFunction::shifted(c, 2.5));
    const auto snet = Network::parallel(shifted);
    const double M = std::pow(10.0, logM(rng));
    const auto a = wardrop(net, M);
    const auto b = wardrop(snet, M);
    for (std::size_t p = 0; p < a.flow.size(); ++p) {
      EXPECT_NEAR(a.flow[p], b.flow[p], 1e-9 * M);
    }
    EXPECT_NEAR(b.lambda, a.lambda + 2.5, 1e-9 * b.lambda);
  }
}
