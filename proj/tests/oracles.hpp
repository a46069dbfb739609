#pragma once

// Brute-force reference computations used only by the tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "geopart/graph.hpp"
#include "geopart/influence.hpp"

namespace oracle {

// 2D Hilbert index via the classic quadrant-rotation loop.
inline std::uint64_t xy2d(std::uint32_t side, std::uint32_t x, std::uint32_t y) {
  std::uint64_t d = 0;
  for (std::uint32_t s = side / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) > 0;
    const std::uint32_t ry = (y & s) > 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - x;
        y = s - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

template <std::size_t D>
std::set<std::pair<std::uint32_t, std::uint32_t>> all_pairs_within(
    const std::vector<geopart::Point<D>>& points, double radius) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    for (std::uint32_t j = i + 1; j < points.size(); ++j) {
      if (geopart::squared_distance(points[i], points[j]) <= radius * radius) edges.insert({i, j});
    }
  }
  return edges;
}

template <std::size_t D>
double edge_cut(const geopart::GeometricGraph<D>& g, const geopart::Partition& part) {
  double cut = 0.0;
  for (geopart::VertexId v = 0; v < g.num_vertices(); ++v) {
    const auto nbrs = g.neighbors(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (nbrs[i] > v && part.assignment[v] != part.assignment[nbrs[i]]) cut += g.edge_weight(v, i);
    }
  }
  return cut;
}

template <std::size_t D>
std::vector<std::uint64_t> comm_per_block(const geopart::GeometricGraph<D>& g,
                                          const geopart::Partition& part) {
  std::vector<std::uint64_t> comm(static_cast<std::size_t>(part.k), 0);
  for (geopart::VertexId v = 0; v < g.num_vertices(); ++v) {
    std::set<geopart::BlockId> foreign;
    for (const auto u : g.neighbors(v)) {
      if (part.assignment[u] != part.assignment[v]) foreign.insert(part.assignment[u]);
    }
    comm[static_cast<std::size_t>(part.assignment[v])] += foreign.size();
  }
  return comm;
}

// Exact diameter of the subgraph induced by `block` via BFS from every
// vertex; -1 when disconnected.
template <std::size_t D>
long exact_block_diameter(const geopart::GeometricGraph<D>& g, const geopart::Partition& part,
                          geopart::BlockId block) {
  std::vector<geopart::VertexId> members;
  for (geopart::VertexId v = 0; v < g.num_vertices(); ++v) {
    if (part.assignment[v] == block) members.push_back(v);
  }
  long diameter = 0;
  std::vector<long> dist(g.num_vertices());
  for (const auto s : members) {
    std::fill(dist.begin(), dist.end(), -1);
    std::vector<geopart::VertexId> queue{s};
    dist[s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto v = queue[head];
      for (const auto u : g.neighbors(v)) {
        if (part.assignment[u] == block && dist[u] < 0) {
          dist[u] = dist[v] + 1;
          queue.push_back(u);
        }
      }
    }
    if (queue.size() != members.size()) return -1;
    for (const auto v : members) diameter = std::max(diameter, dist[v]);
  }
  return diameter;
}

// Cluster minimizing distance/influence, lowest index on ties.
template <std::size_t D>
std::size_t argmin_effective(const geopart::Point<D>& p, const geopart::ClusterState<D>& state) {
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < state.centers.size(); ++c) {
    double sq = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
      const double t = p[i] - state.centers[c][i];
      sq += t * t;
    }
    const double e = std::sqrt(sq) / state.influence[c];
    if (e < best_value) {
      best_value = e;
      best = c;
    }
  }
  return best;
}

// Random connected-or-not graph: a random spanning path subset plus extra edges.
inline geopart::GeometricGraph<2> random_graph(std::size_t n, double extra_per_vertex,
                                               std::mt19937_64& rng, bool connected) {
  std::vector<geopart::WeightedEdge> edges;
  std::set<std::pair<geopart::VertexId, geopart::VertexId>> seen;
  auto add = [&](geopart::VertexId a, geopart::VertexId b) {
    if (a == b) return;
    if (a > b) std::swap(a, b);
    if (seen.insert({a, b}).second) edges.push_back({a, b, 1.0});
  };
  if (connected) {
    for (geopart::VertexId v = 1; v < n; ++v) {
      add(v, static_cast<geopart::VertexId>(std::uniform_int_distribution<std::size_t>(0, v - 1)(rng)));
    }
  }
  const auto extra = static_cast<std::size_t>(extra_per_vertex * static_cast<double>(n));
  std::uniform_int_distribution<geopart::VertexId> pick(0, static_cast<geopart::VertexId>(n - 1));
  for (std::size_t e = 0; e < extra; ++e) add(pick(rng), pick(rng));
  std::vector<geopart::Point<2>> coords(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& c : coords) c = {unit(rng), unit(rng)};
  return geopart::GeometricGraph<2>::from_edges(n, edges, std::move(coords));
}

}  // namespace oracle
