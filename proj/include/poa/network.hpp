#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "poa/cost.hpp"

namespace poa {

struct Edge {
  std::string id;
  std::string tail;
  std::string head;
  CostFunction cost;
};

/// Directed multigraph with a single source/sink pair and its exhaustive
/// list of simple source-sink paths. Immutable after construction.
class Network {
 public:
  static constexpr std::size_t kDefaultPathCap = 100000;

  Network(std::vector<std::string> vertices, std::vector<Edge> edges,
          std::string source, std::string sink,
          std::size_t path_cap = kDefaultPathCap);

  // Two vertices s, t joined by one edge per cost; paths coincide with edges.
  static Network parallel(std::vector<CostFunction> costs);

  static Network from_json(const nlohmann::json& j,
                           std::size_t path_cap = kDefaultPathCap);
  nlohmann::json to_json() const;

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  // Each path is a list of edge indices from source to sink.
  const std::vector<std::vector<std::size_t>>& paths() const { return paths_; }
  const std::string& source() const { return source_; }
  const std::string& sink() const { return sink_; }

  std::size_t edge_count() const { return edges_.size(); }
  std::size_t path_count() const { return paths_.size(); }
  const CostFunction& cost(std::size_t edge) const { return edges_[edge].cost; }
  std::vector<CostFunction> costs() const;

  bool is_parallel() const { return parallel_; }
  bool all_continuous() const;

 private:
  void enumerate_paths(std::size_t path_cap);

  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::string source_;
  std::string sink_;
  std::vector<std::vector<std::size_t>> paths_;
  bool parallel_ = false;
};

/// Nonnegative per-path flows routing total demand M.
class FlowProfile {
 public:
  FlowProfile() = default;
  // Validates nonnegativity and sum == total (1e-12 relative).
  FlowProfile(std::vector<double> path_flows, double total);

  const std::vector<double>& path_flows() const { return flows_; }
  double total() const { return total_; }
  double operator[](std::size_t i) const { return flows_[i]; }
  std::size_t size() const { return flows_.size(); }

 private:
  std::vector<double> flows_;
  double total_ = 0.0;
};

// x_e = sum of x_P over paths P containing e.
std::vector<double> edge_flows(const Network& net,
                               std::span<const double> path_flows);
std::vector<double> edge_flows(const Network& net, const FlowProfile& flow);

// c_P = sum over e in P of c_e(x_e). `right` selects right limits.
std::vector<double> path_costs(const Network& net,
                               std::span<const double> edge_flow,
                               bool right = false);

// sum_e x_e c_e(x_e)
double social_cost(const Network& net, const FlowProfile& flow);
// sum_P x_P c_P(x); equal to social_cost up to rounding
double social_cost_by_paths(const Network& net, const FlowProfile& flow);

}  // namespace poa
