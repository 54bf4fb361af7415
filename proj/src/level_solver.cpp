#include "poa/detail/level_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "poa/errors.hpp"

namespace poa::detail {

namespace {

struct Bounds {
  std::vector<Interval> per_link;
  double lower = 0.0;
  double upper = 0.0;
};

// Per-link intervals with +inf clipped to `cap`.
Bounds evaluate(const std::vector<LevelInverse>& inverses, double level,
                double cap) {
  Bounds b;
  b.per_link.reserve(inverses.size());
  for (const auto& inv : inverses) {
    Interval iv = inv(level);
    iv.lo = std::min(iv.lo, cap);
    iv.hi = std::min(iv.hi, cap);
    b.lower += iv.lo;
    b.upper += iv.hi;
    b.per_link.push_back(iv);
  }
  return b;
}

std::vector<double> allocate(std::vector<Interval> box, double M) {
  double base = 0.0;
  double width = 0.0;
  for (Interval& iv : box) {
    iv.hi = std::min(iv.hi, iv.lo + M);
    base += iv.lo;
    width += iv.width();
  }
  const double surplus = std::max(0.0, M - base);
  std::vector<double> x(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    x[i] = box[i].lo;
    if (width > 0.0) x[i] += surplus * (box[i].width() / width);
  }
  // Absorb rounding in the largest entry so the flows sum to M.
  const double sum = std::accumulate(x.begin(), x.end(), 0.0);
  auto big = std::max_element(x.begin(), x.end());
  *big = std::max(0.0, *big + (M - sum));
  return x;
}

}  // namespace

LevelSolution solve_level(const std::vector<LevelInverse>& inverses, double M,
                          double level_lo, double level_hi,
                          double growth_cap) {
  const double cap = 2.0 * M + 1.0;
  LevelSolution out;

  auto finish_at = [&](double level, const Bounds& b) {
    out.level = level;
    out.flows = allocate(b.per_link, M);
    return out;
  };

  Bounds at_lo = evaluate(inverses, level_lo, cap);
  if (at_lo.lower <= M && M <= at_lo.upper) return finish_at(level_lo, at_lo);

  double lo = level_lo;
  double hi = std::max(level_hi, std::nextafter(level_lo, INFINITY));
  const double limit = std::max(hi, 1.0) * growth_cap;
  Bounds at_hi = evaluate(inverses, hi, cap);
  while (at_hi.upper < M) {
    lo = hi;
    hi *= 2.0;
    if (hi > limit) {
      throw ConvergenceError(
          "unbounded cost: no level below the cap routes the demand", hi);
    }
    at_hi = evaluate(inverses, hi, cap);
  }
  if (at_hi.lower <= M) return finish_at(hi, at_hi);

  // sum hi(lo) < M < sum lo(hi)
  for (int it = 0; it < 4000; ++it) {
    out.iterations = it + 1;
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    Bounds b = evaluate(inverses, mid, cap);
    if (b.upper < M) {
      lo = mid;
    } else if (b.lower > M) {
      hi = mid;
    } else {
      return finish_at(mid, b);
    }
  }
  // lo and hi are adjacent doubles straddling the level: every link may
  // take anything between what it accepts just below and just above.
  const Bounds below = evaluate(inverses, lo, cap);
  const Bounds above = evaluate(inverses, hi, cap);
  std::vector<Interval> box(inverses.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    const double a = below.per_link[i].hi;
    const double b = above.per_link[i].lo;
    box[i] = {std::min(a, b), std::max(a, b)};
  }
  out.level = hi;
  out.flows = allocate(std::move(box), M);
  return out;
}

}  // namespace poa::detail
