#include "poa/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "poa/errors.hpp"

namespace poa {

Network::Network(std::vector<std::string> vertices, std::vector<Edge> edges,
                 std::string source, std::string sink, std::size_t path_cap)
    : vertices_(std::move(vertices)),
      edges_(std::move(edges)),
      source_(std::move(source)),
      sink_(std::move(sink)) {
  auto known = [&](const std::string& v) {
    return std::find(vertices_.begin(), vertices_.end(), v) != vertices_.end();
  };
  if (!known(source_) || !known(sink_)) {
    throw DomainError("network: source and sink must be listed vertices");
  }
  if (source_ == sink_) throw DomainError("network: source equals sink");
  std::vector<std::string> ids;
  for (const Edge& e : edges_) {
    if (!known(e.tail) || !known(e.head)) {
      throw DomainError("network: edge '" + e.id + "' uses unknown vertex");
    }
    ids.push_back(e.id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw DomainError("network: duplicate edge id");
  }
  enumerate_paths(path_cap);
  if (paths_.empty()) throw DomainError("network: no source-sink path");
  parallel_ = std::all_of(edges_.begin(), edges_.end(), [&](const Edge& e) {
    return e.tail == source_ && e.head == sink_;
  });
}

Network Network::parallel(std::vector<CostFunction> costs) {
  if (costs.empty()) throw DomainError("parallel network needs >= 1 link");
  std::vector<Edge> edges;
  edges.reserve(costs.size());
  for (std::size_t i = 0; i < costs.size(); ++i) {
    edges.push_back({"e" + std::to_string(i + 1), "s", "t", std::move(costs[i])});
  }
  return Network({"s", "t"}, std::move(edges), "s", "t");
}

void Network::enumerate_paths(std::size_t path_cap) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    out[edges_[i].tail].push_back(i);
  }
  // Iterative DFS over simple paths; `on_path` rejects cycles.
  std::vector<std::size_t> stack_edges;
  std::vector<std::string> on_path{source_};
  auto dfs = [&](auto&& self, const std::string& v) -> void {
    if (v == sink_) {
      paths_.push_back(stack_edges);
      if (paths_.size() > path_cap) {
        throw DomainError("network: more than " + std::to_string(path_cap) +
                          " source-sink paths");
      }
      return;
    }
    for (std::size_t e : out[v]) {
      const std::string& w = edges_[e].head;
      if (std::find(on_path.begin(), on_path.end(), w) != on_path.end()) {
        continue;
      }
      stack_edges.push_back(e);
      on_path.push_back(w);
      self(self, w);
      on_path.pop_back();
      stack_edges.pop_back();
    }
  };
  dfs(dfs, source_);
}

std::vector<CostFunction> Network::costs() const {
  std::vector<CostFunction> out;
  for (const Edge& e : edges_) out.push_back(e.cost);
  return out;
}

bool Network::all_continuous() const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [](const Edge& e) { return e.cost.is_continuous(); });
}

Network Network::from_json(const nlohmann::json& j, std::size_t path_cap) {
  try {
    std::vector<std::string> vertices;
    for (const auto& v : j.at("vertices")) vertices.push_back(v.get<std::string>());
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      edges.push_back({e.at("id").get<std::string>(),
                       e.at("tail").get<std::string>(),
                       e.at("head").get<std::string>(),
                       CostFunction::from_json(e.at("cost"))});
    }
    return Network(std::move(vertices), std::move(edges),
                   j.at("source").get<std::string>(),
                   j.at("sink").get<std::string>(), path_cap);
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("network spec: ") + ex.what());
  }
}

nlohmann::json Network::to_json() const {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : edges_) {
    edges.push_back({{"id", e.id},
                     {"tail", e.tail},
                     {"head", e.head},
                     {"cost", e.cost.to_json()}});
  }
  return {{"vertices", vertices_},
          {"edges", edges},
          {"source", source_},
          {"sink", sink_}};
}

FlowProfile::FlowProfile(std::vector<double> path_flows, double total)
    : flows_(std::move(path_flows)), total_(total) {
  if (!(total_ >= 0.0)) throw DomainError("flow: total demand must be >= 0");
  for (double f : flows_) {
    if (!(f >= 0.0)) throw DomainError("flow: path flows must be >= 0");
  }
  const double sum = std::accumulate(flows_.begin(), flows_.end(), 0.0);
  if (std::abs(sum - total_) > 1e-12 * std::max(total_, 1e-300) &&
      !(sum == 0.0 && total_ == 0.0)) {
    throw DomainError("flow: path flows sum to " + std::to_string(sum) +
                      ", expected " + std::to_string(total_));
  }
}

std::vector<double> edge_flows(const Network& net,
                               std::span<const double> path_flows) {
  if (path_flows.size() != net.path_count()) {
    throw DomainError("edge_flows: expected " +
                      std::to_string(net.path_count()) + " path flows, got " +
                      std::to_string(path_flows.size()));
  }
  std::vector<double> x(net.edge_count(), 0.0);
  for (std::size_t p = 0; p < net.path_count(); ++p) {
    for (std::size_t e : net.paths()[p]) x[e] += path_flows[p];
  }
  return x;
}

std::vector<double> edge_flows(const Network& net, const FlowProfile& flow) {
  return edge_flows(net, std::span<const double>(flow.path_flows()));
}

std::vector<double> path_costs(const Network& net,
                               std::span<const double> edge_flow, bool right) {
  std::vector<double> ce(net.edge_count());
  for (std::size_t e = 0; e < net.edge_count(); ++e) {
    ce[e] = right ? net.cost(e).right_limit(edge_flow[e])
                  : net.cost(e).eval(edge_flow[e]);
  }
  std::vector<double> cp(net.path_count(), 0.0);
  for (std::size_t p = 0; p < net.path_count(); ++p) {
    for (std::size_t e : net.paths()[p]) cp[p] += ce[e];
  }
  return cp;
}

double social_cost(const Network& net, const FlowProfile& flow) {
  const std::vector<double> x = edge_flows(net, flow);
  double total = 0.0;
  for (std::size_t e = 0; e < x.size(); ++e) {
    if (x[e] > 0.0) total += x[e] * net.cost(e).eval(x[e]);
  }
  return total;
}

double social_cost_by_paths(const Network& net, const FlowProfile& flow) {
  const std::vector<double> x = edge_flows(net, flow);
  const std::vector<double> cp = path_costs(net, x);
  double total = 0.0;
  for (std::size_t p = 0; p < cp.size(); ++p) {
    if (flow[p] > 0.0) total += flow[p] * cp[p];
  }
  return total;
}

}  // namespace poa
