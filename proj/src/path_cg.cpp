#include "poa/detail/path_cg.hpp"

#include <algorithm>
#include <cmath>

#include "poa/errors.hpp"

namespace poa::detail {

namespace {

std::vector<double> path_gradients(const Network& net,
                                   const std::vector<double>& x_edge,
                                   const EdgeGradient& gradient) {
  std::vector<double> g_edge(net.edge_count());
  for (std::size_t e = 0; e < g_edge.size(); ++e) g_edge[e] = gradient(e, x_edge[e]);
  std::vector<double> g(net.path_count(), 0.0);
  for (std::size_t p = 0; p < g.size(); ++p) {
    for (std::size_t e : net.paths()[p]) g[p] += g_edge[e];
  }
  return g;
}

}  // namespace

PathCgResult pairwise_conditional_gradient(const Network& net, double M,
                                           const EdgeGradient& gradient,
                                           double rel_tol,
                                           int max_iterations) {
  const std::size_t n = net.path_count();
  PathCgResult out;
  out.path_flows.assign(n, 0.0);

  std::vector<double> zero(net.edge_count(), 0.0);
  const auto g0 = path_gradients(net, zero, gradient);
  out.path_flows[std::min_element(g0.begin(), g0.end()) - g0.begin()] = M;

  for (int it = 0; it <= max_iterations; ++it) {
    const auto x_edge = edge_flows(net, out.path_flows);
    const auto g = path_gradients(net, x_edge, gradient);
    const std::size_t best = std::min_element(g.begin(), g.end()) - g.begin();
    std::size_t worst = best;
    for (std::size_t p = 0; p < n; ++p) {
      if (out.path_flows[p] > 0.0 && g[p] > g[worst]) worst = p;
    }
    out.level = g[best];
    out.residual = g[worst] - g[best];
    out.iterations = it;
    if (out.residual <= rel_tol * std::max(out.level, 1.0)) return out;
    if (it == max_iterations) break;

    // Directional derivative of the objective along best - worst.
    const double room = out.path_flows[worst];
    auto slope = [&](double t) {
      std::vector<double> y = out.path_flows;
      y[worst] -= t;
      y[best] += t;
      const auto gy = path_gradients(net, edge_flows(net, y), gradient);
      return gy[best] - gy[worst];
    };
    double step = room;
    if (slope(room) > 0.0) {
      double lo = 0.0;
      double hi = room;
      for (int k = 0; k < 200; ++k) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        (slope(mid) > 0.0 ? hi : lo) = mid;
      }
      step = 0.5 * (lo + hi);
    }
    out.path_flows[worst] -= step;
    out.path_flows[best] += step;
    if (out.path_flows[worst] < 1e-15 * M) {
      out.path_flows[best] += out.path_flows[worst];
      out.path_flows[worst] = 0.0;
    }
  }
  throw ConvergenceError("conditional gradient hit the iteration cap",
                         out.residual);
}

}  // namespace poa::detail
