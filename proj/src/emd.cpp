// Copyright 2026 The ProRec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/successive_shortest_path_nonnegative_weights.hpp>

#include "prorec/errors.hpp"
#include "prorec/transport.hpp"

namespace prorec {
namespace {

constexpr std::int64_t kMassUnits = 1'000'000;
// Costs are mapped onto [0, kCostUnits] integers for the flow solver.
constexpr double kCostUnits = 1e12;

using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS,
                                            boost::directedS>;
using Graph = boost::adjacency_list<
    boost::vecS, boost::vecS, boost::directedS, boost::no_property,
    boost::property<
        boost::edge_capacity_t, std::int64_t,
        boost::property<
            boost::edge_residual_capacity_t, std::int64_t,
            boost::property<boost::edge_reverse_t, Traits::edge_descriptor,
                            boost::property<boost::edge_weight_t,
                                            std::int64_t>>>>>;
using Edge = Traits::edge_descriptor;

// Largest-remainder rounding of `mass * kMassUnits` so the units sum to
// exactly kMassUnits.
std::vector<std::int64_t> to_units(const Vector& mass) {
  const double total = mass.sum();
  std::vector<std::int64_t> units(static_cast<std::size_t>(mass.size()));
  std::vector<std::pair<double, std::size_t>> remainders;
  std::int64_t assigned = 0;
  for (Index k = 0; k < mass.size(); ++k) {
    const double exact = mass[k] / total * static_cast<double>(kMassUnits);
    const double floor_val = std::floor(exact);
    units[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(floor_val);
    assigned += units[static_cast<std::size_t>(k)];
    remainders.emplace_back(exact - floor_val, static_cast<std::size_t>(k));
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::int64_t r = 0; r < kMassUnits - assigned; ++r) {
    ++units[remainders[static_cast<std::size_t>(r) % remainders.size()].second];
  }
  return units;
}

class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t n_vertices) : graph_(n_vertices) {}

  Edge add(std::size_t from, std::size_t to, std::int64_t capacity,
           std::int64_t weight) {
    auto capacity_map = boost::get(boost::edge_capacity, graph_);
    auto weight_map = boost::get(boost::edge_weight, graph_);
    auto reverse_map = boost::get(boost::edge_reverse, graph_);
    const Edge e = boost::add_edge(from, to, graph_).first;
    const Edge r = boost::add_edge(to, from, graph_).first;
    capacity_map[e] = capacity;
    capacity_map[r] = 0;
    weight_map[e] = weight;
    weight_map[r] = -weight;
    reverse_map[e] = r;
    reverse_map[r] = e;
    return e;
  }

  void solve(std::size_t source, std::size_t sink) {
    boost::successive_shortest_path_nonnegative_weights(graph_, source, sink);
  }

  std::int64_t flow(const Edge& e) const {
    return boost::get(boost::edge_capacity, graph_, e) -
           boost::get(boost::edge_residual_capacity, graph_, e);
  }

 private:
  Graph graph_;
};

}  // namespace

TransportPlan emd_exact_small(const CostMatrix& cost,
                              const Marginals& marginals) {
  const Index m = cost.rows();
  const Index n = cost.cols();
  if (m * n > kEmdMaxEntries) {
    throw UnsupportedSizeError("emd_exact_small supports at most " +
                               std::to_string(kEmdMaxEntries) +
                               " cost entries, got " + std::to_string(m * n));
  }
  if (m == 0 || n == 0) throw ShapeError("cost matrix is empty");
  if (marginals.users.size() != m || marginals.items.size() != n) {
    throw ShapeError("marginal lengths do not match the cost matrix");
  }
  if (!cost.values.allFinite()) {
    throw NumericalError("cost matrix has non-finite entries");
  }
  if ((marginals.users.array() < 0.0).any() ||
      (marginals.items.array() < 0.0).any()) {
    throw InfeasibleError("marginals must be nonnegative");
  }
  const double user_total = marginals.users.sum();
  const double item_total = marginals.items.sum();
  if (!(user_total > 0.0) || std::abs(user_total - item_total) > 1e-9) {
    throw InfeasibleError("marginal totals differ: users " +
                          std::to_string(user_total) + ", items " +
                          std::to_string(item_total));
  }

  const auto supply = to_units(marginals.users);
  const auto demand = to_units(marginals.items);
  const double lo = cost.values.minCoeff();
  const double range = cost.values.maxCoeff() - lo;
  const double cost_scale = range > 0.0 ? kCostUnits / range : 1.0;

  // Vertices: source, users, items, sink.
  const std::size_t source = 0;
  const std::size_t sink = static_cast<std::size_t>(m + n + 1);
  auto user_vertex = [](Index u) { return static_cast<std::size_t>(1 + u); };
  auto item_vertex = [m](Index i) {
    return static_cast<std::size_t>(1 + m + i);
  };
  FlowNetwork network(static_cast<std::size_t>(m + n + 2));
  for (Index u = 0; u < m; ++u) {
    network.add(source, user_vertex(u), supply[static_cast<std::size_t>(u)],
                0);
  }
  for (Index i = 0; i < n; ++i) {
    network.add(item_vertex(i), sink, demand[static_cast<std::size_t>(i)], 0);
  }
  std::vector<Edge> transport_edges;
  transport_edges.reserve(static_cast<std::size_t>(m * n));
  for (Index u = 0; u < m; ++u) {
    for (Index i = 0; i < n; ++i) {
      const auto w = static_cast<std::int64_t>(
          std::llround((cost.values(u, i) - lo) * cost_scale));
      transport_edges.push_back(
          network.add(user_vertex(u), item_vertex(i), kMassUnits, w));
    }
  }
  network.solve(source, sink);

  TransportPlan plan;
  plan.kind = PlanKind::kEmd;
  plan.pi.resize(m, n);
  const double scale = user_total / static_cast<double>(kMassUnits);
  std::size_t k = 0;
  for (Index u = 0; u < m; ++u) {
    for (Index i = 0; i < n; ++i) {
      plan.pi(u, i) = static_cast<double>(network.flow(transport_edges[k++])) *
                      scale;
    }
  }
  return plan;
}

}  // namespace prorec
