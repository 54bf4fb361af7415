#pragma once

#include <functional>
#include <vector>

#include "poa/cost.hpp"

namespace poa::detail {

// Maps a common level (cost lambda or marginal mu) to the set of flows a
// link accepts at that level.
using LevelInverse = std::function<Interval(double)>;

struct LevelSolution {
  double level = 0.0;
  std::vector<double> flows;
  int iterations = 0;
};

// Finds a level L with M in [sum_i lo_i(L), sum_i hi_i(L)] by monotone
// bisection and splits M inside the per-link intervals, surplus shared in
// proportion to interval width. `level_lo` must satisfy sum hi_i <= M or
// already contain M; `level_hi` is doubled until sum hi_i >= M, at most
// `growth_cap` times its starting value.
LevelSolution solve_level(const std::vector<LevelInverse>& inverses, double M,
                          double level_lo, double level_hi, double growth_cap);

}  // namespace poa::detail
