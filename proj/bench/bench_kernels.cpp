// Serial reference vs OpenMP kernels: brute-force optimum and PoA sweep.

#include <benchmark/benchmark.h>

#include "poa/asymptotics.hpp"
#include "poa/optimum.hpp"

using namespace poa;

namespace {

Network step_net() {
  return Network::parallel({CostFunction::identity(), CostFunction::step_geometric(2.0)});
}

Network three_links() {
  return Network::parallel({CostFunction::identity(), CostFunction::step_geometric(3.0),
                            CostFunction::affine(1.0, 0.5)});
}

template <Execution E>
void BM_BruteForceTwoLinks(benchmark::State& state) {
  const auto net = step_net();
  BruteForceOptions o;
  o.resolution = static_cast<int>(state.range(0));
  o.execution = E;
  for (auto _ : state) benchmark::DoNotOptimize(opt_bruteforce(net, 37.0, o).cost);
}

template <Execution E>
void BM_BruteForceThreeLinks(benchmark::State& state) {
  const auto net = three_links();
  BruteForceOptions o;
  o.resolution = static_cast<int>(state.range(0));
  o.execution = E;
  for (auto _ : state) benchmark::DoNotOptimize(opt_bruteforce(net, 11.0, o).cost);
}

template <Execution E>
void BM_StepSweep(benchmark::State& state) {
  const auto net = step_net();
  SweepOptions o;
  o.M_lo = 4.0;
  o.M_hi = 4.0 * std::pow(2.0, 10);
  o.per_decade = static_cast<int>(state.range(0));
  o.hints = step_breakpoints(2.0, o.M_lo, o.M_hi);
  o.period_base = 2.0;
  o.execution = E;
  for (auto _ : state) benchmark::DoNotOptimize(poa_sweep(net, o).samples.size());
}

}  // namespace

BENCHMARK(BM_BruteForceTwoLinks<Execution::kSerial>)->Arg(4001)->Arg(40001);
BENCHMARK(BM_BruteForceTwoLinks<Execution::kParallel>)->Arg(4001)->Arg(40001);
BENCHMARK(BM_BruteForceThreeLinks<Execution::kSerial>)->Arg(201)->Arg(801)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceThreeLinks<Execution::kParallel>)->Arg(201)->Arg(801)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StepSweep<Execution::kSerial>)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StepSweep<Execution::kParallel>)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
