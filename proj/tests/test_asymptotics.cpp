#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "poa/asymptotics.hpp"
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

double jump_value(double a) { return (4.0 + 4.0 * a) / (4.0 + 3.0 * a); }

PoaCurve step_sweep(double a, double lo, double hi, Execution ex = Execution::kParallel) {
  SweepOptions o;
  o.M_lo = lo;
  o.M_hi = hi;
  o.per_decade = 512;
  o.hints = step_breakpoints(a, lo, hi);
  o.period_base = a;
  o.execution = ex;
  return poa_sweep(step(a), o);
}

}  // namespace

TEST(PriceOfAnarchy, Examples) {
  EXPECT_NEAR(price_of_anarchy(pigou(), 1.0).poa, 4.0 / 3.0, 1e-9);
  EXPECT_NEAR(price_of_anarchy(Network::parallel({CostFunction::identity(), CostFunction::identity()}), 3.0).poa,
              1.0, 1e-12);
  EXPECT_NEAR(price_of_anarchy(step(2.0), 6.0 * (1.0 + 1e-9)).poa, 1.2, 1e-6);
  const auto single = Network::parallel({CostFunction::polynomial({1.0, 2.0, 3.0})});
  for (double M : {0.1, 1.0, 100.0}) EXPECT_EQ(price_of_anarchy(single, M).poa, 1.0);
  EXPECT_THROW(price_of_anarchy(pigou(), 0.0), DomainError);
}

TEST(PriceOfAnarchy, ExpInstanceUsesLogDomain) {
  const auto net = Network::parallel(
      {CostFunction::exp_over_x(), CostFunction::step_exp(AlphaSequence::factorial(12))});
  const auto v = price_of_anarchy(net, (120.0 + 720.0) * (1.0 + 1e-6));
  EXPECT_TRUE(v.log_domain);
  EXPECT_FALSE(std::isfinite(v.weq));
  EXPECT_GT(v.poa, 1.0);
}

TEST(StepClosedForm, ClosedFormExamples) {
  EXPECT_NEAR(thm5_closed_form(2.0, 6.0 * (1.0 + 1e-12)).poa, 1.2, 1e-9);
  EXPECT_NEAR(thm5_closed_form(2.0, 8.0).poa, 1.0, 1e-12);
  const auto early = thm5_closed_form(2.0, 4.1);
  EXPECT_EQ(early.region, 0);
  EXPECT_EQ(early.poa, 1.0);
  EXPECT_EQ(early.k, 1);
  EXPECT_THROW(thm5_closed_form(1.5, 4.0), DomainError);
  EXPECT_NEAR(thm5_limsup(2.0), 1.2, 1e-15);
  EXPECT_NEAR(thm5_limsup(3.0), 16.0 / 13.0, 1e-15);
}

TEST(StepClosedForm, ClosedFormMatchesSolvers) {
  std::mt19937_64 rng(211);
  for (double a : {2.0, 3.0, 5.0}) {
    std::uniform_real_distribution<double> logM(std::log(2.0 * a), std::log(2.0 * a * a * a));
    const auto breaks = step_breakpoints(a, a, 2.0 * a * a * a * a);
    int checked = 0;
    while (checked < 10000) {
      const double M = std::exp(logM(rng));
      const bool near_break = std::any_of(breaks.begin(), breaks.end(), [&](double b) {
        return std::abs(M - b) <= 1e-8 * b;
      });
      if (near_break) continue;
      ++checked;
      const double exact = thm5_closed_form(a, M).poa;
      const double numeric = price_of_anarchy(step(a), M).poa;
      ASSERT_NEAR(exact / numeric, 1.0, 1e-6) << "a=" << a << " M=" << M;
    }
  }
}

TEST(Sweep, StepShapeOverOnePeriod) {
  const double a = 3.0;
  const auto curve = step_sweep(a, 2.0 * a, 2.0 * a * a);
  EXPECT_TRUE(curve.failures.empty());
  const double jump = a * (1.0 + a);
  // beta a^k is the second-to-last... use the closed form's region tag.
  double prev = 0.0;
  bool after_jump = false;
  for (const auto& s : curve.samples) {
    const double M = s.value.M;
    const double p = s.value.poa;
    EXPECT_GE(p, 1.0 - 1e-9);
    EXPECT_NEAR(p, s.value.weq / s.value.opt, 1e-12 * p);
    const auto region = thm5_closed_form(a, M).region;
    if (region == 0) EXPECT_NEAR(p, 1.0, 1e-9) << M;
    if (region == 1 && M < jump) EXPECT_GE(p, prev - 1e-12) << M;
    if (M > jump) {
      if (after_jump) EXPECT_LE(p, prev + 1e-12) << M;
      after_jump = true;
    }
    prev = p;
  }
  EXPECT_NEAR(curve.samples.back().value.poa, 1.0, 1e-9);
}

TEST(Sweep, AffineAndFailures) {
  SweepOptions o;
  o.M_lo = 1.0;
  o.M_hi = 1e6;
  o.per_decade = 16;
  const auto curve = poa_sweep(
      Network::parallel({CostFunction::affine(1.0, 1.0), CostFunction::affine(2.0, 3.0)}), o);
  EXPECT_LE(curve.samples.back().value.poa - 1.0, 1e-2);
  SweepOptions bad = o;
  bad.M_hi = 0.5;
  EXPECT_THROW(poa_sweep(pigou(), bad), DomainError);

  // Samples past the last alpha breakpoint fail individually.
  const auto exp_net = Network::parallel(
      {CostFunction::exp_over_x(), CostFunction::step_exp(AlphaSequence::factorial(5))});
  SweepOptions e;
  e.M_lo = 10.0;
  e.M_hi = 1e4;
  e.per_decade = 8;
  const auto ec = poa_sweep(exp_net, e);
  EXPECT_FALSE(ec.failures.empty());
  EXPECT_LT(ec.failures.size(), ec.samples.size());
  for (auto i : ec.failures) EXPECT_FALSE(ec.samples[i].flag.empty());
}

TEST(Sweep, SerialAndParallelIdentical) {
  const auto a = step_sweep(2.0, 4.0, 200.0, Execution::kSerial);
  const auto b = step_sweep(2.0, 4.0, 200.0, Execution::kParallel);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].value.M, b.samples[i].value.M);
    EXPECT_EQ(a.samples[i].value.poa, b.samples[i].value.poa);
  }
}

TEST(Extremes, StepFamily) {
  for (double a : {2.0, 3.0}) {
    const auto curve = step_sweep(a, 2.0 * a, 2.0 * std::pow(a, 5));
    const auto ex = extremes_estimate(curve, 3);
    EXPECT_TRUE(ex.accepted);
    EXPECT_NEAR(ex.limsup, jump_value(a), 1e-3);
    EXPECT_LE(ex.limsup, jump_value(a) + 1e-12);
    EXPECT_NEAR(ex.liminf, 1.0, 1e-9);
    for (const auto& p : curve.periods) {
      if (!p.complete) continue;
      EXPECT_GE(p.max_poa, jump_value(a) - 1e-3) << p.k;
      EXPECT_LE(p.max_poa, jump_value(a) + 1e-12) << p.k;
      EXPECT_NEAR(p.min_poa, 1.0, 1e-9) << p.k;
    }
  }
}

TEST(Extremes, SmallDemandPeriods) {
  for (double a : {2.0, 3.0}) {
    const auto curve = step_sweep(a, 2.0 * std::pow(a, -3), 2.0);
    int seen = 0;
    for (const auto& p : curve.periods) {
      if (!p.complete) continue;
      ASSERT_GE(p.k, -3);
      ASSERT_LE(p.k, -1);
      ++seen;
      EXPECT_GE(p.max_poa, jump_value(a) - 1e-3) << p.k;
      EXPECT_LE(p.max_poa, jump_value(a) + 1e-12) << p.k;
      EXPECT_NEAR(p.min_poa, 1.0, 1e-9) << p.k;
    }
    EXPECT_EQ(seen, 3);
  }
}

TEST(Extremes, ConstantCostsAndGuards) {
  SweepOptions o;
  o.M_lo = 1.0;
  o.M_hi = 1e4;
  o.per_decade = 32;
  const auto curve = poa_sweep(
      Network::parallel({CostFunction::constant(2.0), CostFunction::constant(2.0)}), o);
  const auto ex = extremes_estimate(curve, 3);
  EXPECT_EQ(ex.liminf, 1.0);
  EXPECT_EQ(ex.limsup, 1.0);
  EXPECT_THROW(extremes_estimate(curve, 10), DomainError);
}

TEST(PwlSpecialDemand, Constants) {
  const auto c = thm6_constants(2.0);
  EXPECT_NEAR(c.b, std::sqrt(10.0 / 3.0), 1e-14);
  EXPECT_GE(c.poa, 1.0055);
  EXPECT_LE(c.poa, 1.0063);
  EXPECT_GT(c.d, 1.0);
  EXPECT_LT(c.d, 2.0);
  EXPECT_THROW(thm6_constants(1.0), DomainError);
}

TEST(PwlSpecialDemand, NumericIndependentOfK) {
  const auto c = thm6_constants(2.0);
  const auto net = Network::parallel({CostFunction::monomial(1.0, 2.0), CostFunction::pwl_square(2.0)});
  for (int k = 1; k <= 5; ++k) {
    const double M = thm6_demand(2.0, k);
    const double p = price_of_anarchy(net, M).poa;
    EXPECT_NEAR(p / c.poa, 1.0, 1e-9) << k;
    const double brute = price_of_anarchy(net, M, OptMethod::kBrute).poa;
    EXPECT_NEAR(brute, p, 1e-4) << k;
  }
}

TEST(ExpGrowth, FactorialValues) {
  const auto alpha = AlphaSequence::factorial(12);
  const auto v4 = thm7_poa_near_breakpoint(alpha, 4);
  EXPECT_NEAR(v4.closed_form, 144.0 / (1.0 + 24.0 + std::log(120.0)), 1e-12);
  EXPECT_NEAR(v4.numeric / v4.closed_form, 1.0, 1e-2);
  double prev = 0.0;
  for (int k = 3; k <= 9; ++k) {
    const auto v = thm7_poa_near_breakpoint(alpha, k);
    EXPECT_GT(v.closed_form, prev) << k;
    EXPECT_TRUE(v.claim_holds) << k;
    prev = v.closed_form;
  }
  EXPECT_THROW(thm7_poa_near_breakpoint(AlphaSequence::factorial(4), 4), RangeError);
  EXPECT_THROW(thm7_poa_near_breakpoint(alpha, 0), DomainError);
  EXPECT_NO_THROW(thm7_poa_near_breakpoint(alpha, 1));
}

TEST(ExpGrowth, LogDomainMatchesNative) {
  const auto alpha = AlphaSequence::explicit_values({1.0, 3.0, 30.0, 90.0, 400.0});
  const auto net = Network::parallel({CostFunction::exp_over_x(), CostFunction::step_exp(alpha)});
  for (double M : {7.0, 20.0, 33.0 * (1.0 + 1e-6), 50.0, 90.0, 119.0, 125.0}) {
    const auto v = price_of_anarchy(net, M);
    ASSERT_TRUE(v.log_domain);
    const double native = wardrop_parallel(net, M).cost / opt_bruteforce(net, M).cost;
    EXPECT_NEAR(v.poa / native, 1.0, 1e-9) << M;
  }
}

TEST(Experiments, BoundedPaths) {
  const auto r = bounded_path_experiment(pigou(), decade_grid(0.0, 3.0, 8));
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.final_poa - 1.0, 2e-3);
  for (const auto& row : r.rows) EXPECT_LE(row.poa, row.extra * (1.0 + 1e-12));
  const auto flat = bounded_path_experiment(
      Network::parallel({CostFunction::constant(3.0), CostFunction::constant(1.0)}),
      decade_grid(0.0, 3.0, 4));
  for (const auto& row : flat.rows) EXPECT_EQ(row.poa, 1.0);
  EXPECT_THROW(bounded_path_experiment(
                   Network::parallel({CostFunction::identity(), CostFunction::identity()}),
                   decade_grid(0.0, 2.0, 4)),
               DomainError);
}

TEST(Experiments, Shifts) {
  const auto base = Network::parallel({CostFunction::identity(), CostFunction::affine(0.0, 2.0)});
  const auto grid = decade_grid(0.0, 6.0, 8);
  const auto r = shift_experiment(base, {1.0, 3.0}, grid);
  EXPECT_TRUE(r.pass);
  for (const auto& row : r.rows) EXPECT_TRUE(row.ok) << row.M;
  EXPECT_LE(r.final_poa - 1.0, 1e-2);
  const auto zero = shift_experiment(base, {0.0, 0.0}, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(zero.rows[i].poa, price_of_anarchy(base, grid[i]).poa);
  }
  EXPECT_THROW(shift_experiment(base, {1.0}, grid), DomainError);
}

TEST(Experiments, RegularVariationHypotheses) {
  const auto grid = decade_grid(0.0, 6.0, 8);
  const auto affine = rv_poa_experiment(
      Network::parallel({CostFunction::affine(1.0, 1.0), CostFunction::affine(2.0, 3.0)}),
      RvHypothesis::kLinearGrowth, grid);
  EXPECT_TRUE(affine.pass);
  EXPECT_LE(affine.final_poa, 1.01);
  const auto wiggle = rv_poa_experiment(
      Network::parallel({CostFunction::saturating(0.0, 1.0, 1.0, 1.0), CostFunction::identity()}),
      RvHypothesis::kAffineSandwich, grid);
  EXPECT_TRUE(wiggle.pass);
  EXPECT_LE(wiggle.final_poa, 1.01);
  std::vector<HypothesisEstimate> est;
  const auto mixed = rv_poa_experiment(
      Network::parallel({CostFunction::identity(), CostFunction::monomial(1.0, 2.0)}),
      RvHypothesis::kLinearGrowth, grid, nullptr, 1e-2, &est);
  EXPECT_TRUE(mixed.pass);
  EXPECT_LE(mixed.final_poa, 1.01);
  ASSERT_EQ(est.size(), 2u);
  EXPECT_NEAR(est[0].value, 1.0, 1e-9);
  EXPECT_TRUE(std::isinf(est[1].value));
  const auto sq = CostFunction::monomial(1.0, 2.0);
  const auto common = rv_poa_experiment(
      Network::parallel({CostFunction::monomial(2.0, 2.0), CostFunction::polynomial({1.0, 1.0, 3.0})}),
      RvHypothesis::kCommonRv, grid, &sq);
  EXPECT_TRUE(common.pass);
  EXPECT_THROW(rv_poa_experiment(pigou(), RvHypothesis::kCommonRv, grid), DomainError);
}
