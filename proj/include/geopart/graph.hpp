#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "geopart/errors.hpp"
#include "geopart/geometry.hpp"

namespace geopart {

using VertexId = std::uint32_t;
using BlockId = std::int32_t;

struct WeightedEdge {
  VertexId u = 0;
  VertexId v = 0;
  double weight = 1.0;
};

// Undirected graph in compressed adjacency form with a coordinate and a
// positive weight per vertex. Each undirected edge appears in both endpoint
// lists; neighbor lists are kept sorted by id. Edge weights are optional
// (absent means every edge weighs 1).
template <std::size_t D>
class GeometricGraph {
 public:
  GeometricGraph() = default;

  // Takes ownership of a CSR layout and validates every invariant.
  // An empty vertex_weights vector means unit weights.
  GeometricGraph(std::vector<std::size_t> offsets, std::vector<VertexId> neighbors,
                 std::vector<double> edge_weights, std::vector<Point<D>> coords,
                 std::vector<double> vertex_weights = {})
      : offsets_(std::move(offsets)),
        neighbors_(std::move(neighbors)),
        edge_weights_(std::move(edge_weights)),
        coords_(std::move(coords)),
        vertex_weights_(std::move(vertex_weights)) {
    if (vertex_weights_.empty()) vertex_weights_.assign(coords_.size(), 1.0);
    sort_neighbor_lists();
    validate();
  }

  // Builds the symmetric CSR from a list of undirected edges (each listed once).
  static GeometricGraph from_edges(std::size_t n, std::span<const WeightedEdge> edges,
                                   std::vector<Point<D>> coords,
                                   std::vector<double> vertex_weights = {},
                                   bool weighted_edges = false) {
    std::vector<std::size_t> offsets(n + 1, 0);
    for (const auto& e : edges) {
      if (e.u >= n || e.v >= n) throw InputError("from_edges: vertex id out of range");
      ++offsets[e.u + 1];
      ++offsets[e.v + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    std::vector<VertexId> neighbors(offsets.back());
    std::vector<double> weights(weighted_edges ? offsets.back() : 0);
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (const auto& e : edges) {
      const std::size_t a = fill[e.u]++;
      const std::size_t b = fill[e.v]++;
      neighbors[a] = e.v;
      neighbors[b] = e.u;
      if (weighted_edges) {
        weights[a] = e.weight;
        weights[b] = e.weight;
      }
    }
    return GeometricGraph(std::move(offsets), std::move(neighbors), std::move(weights),
                          std::move(coords), std::move(vertex_weights));
  }

  std::size_t num_vertices() const noexcept { return coords_.size(); }
  std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }
  bool has_edge_weights() const noexcept { return !edge_weights_.empty(); }

  std::size_t degree(VertexId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  std::size_t max_degree() const noexcept {
    std::size_t best = 0;
    for (std::size_t v = 0; v < num_vertices(); ++v) {
      best = std::max(best, degree(static_cast<VertexId>(v)));
    }
    return best;
  }

  std::span<const VertexId> neighbors(VertexId v) const noexcept {
    return {neighbors_.data() + offsets_[v], degree(v)};
  }

  // Weight of the i-th edge in v's neighbor list.
  double edge_weight(VertexId v, std::size_t i) const noexcept {
    return edge_weights_.empty() ? 1.0 : edge_weights_[offsets_[v] + i];
  }

  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
  const std::vector<VertexId>& adjacency() const noexcept { return neighbors_; }
  const std::vector<double>& edge_weights() const noexcept { return edge_weights_; }
  const std::vector<Point<D>>& coords() const noexcept { return coords_; }
  const std::vector<double>& vertex_weights() const noexcept { return vertex_weights_; }

  bool unit_vertex_weights() const noexcept {
    return std::all_of(vertex_weights_.begin(), vertex_weights_.end(),
                       [](double w) { return w == 1.0; });
  }

  double total_weight() const noexcept {
    return std::accumulate(vertex_weights_.begin(), vertex_weights_.end(), 0.0);
  }

  // Throws InputError naming the first violated invariant.
  void validate() const {
    const std::size_t n = coords_.size();
    if (offsets_.size() != n + 1) throw InputError("graph: offsets size must be n + 1");
    if (offsets_.front() != 0 || offsets_.back() != neighbors_.size()) {
      throw InputError("graph: offsets do not span the adjacency array");
    }
    if (!std::is_sorted(offsets_.begin(), offsets_.end())) {
      throw InputError("graph: offsets must be nondecreasing");
    }
    if (!edge_weights_.empty() && edge_weights_.size() != neighbors_.size()) {
      throw InputError("graph: edge weight count differs from adjacency size");
    }
    if (vertex_weights_.size() != n) {
      throw InputError("graph: vertex weight count differs from vertex count");
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (!is_finite(coords_[v])) {
        throw InputError("graph: vertex " + std::to_string(v) + " has a non-finite coordinate");
      }
      if (!(vertex_weights_[v] > 0.0) || !std::isfinite(vertex_weights_[v])) {
        throw InputError("graph: vertex " + std::to_string(v) + " has a non-positive weight");
      }
    }
    for (double w : edge_weights_) {
      if (!(w > 0.0) || !std::isfinite(w)) throw InputError("graph: non-positive edge weight");
    }

    // Directed arcs sorted by (u, v); symmetry means the reversed multiset is identical.
    std::vector<std::tuple<VertexId, VertexId, double>> arcs;
    arcs.reserve(neighbors_.size());
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t i = offsets_[u]; i < offsets_[u + 1]; ++i) {
        const VertexId v = neighbors_[i];
        if (v >= n) {
          throw InputError("graph: neighbor id " + std::to_string(v) + " of vertex " +
                           std::to_string(u) + " out of range");
        }
        if (v == u) throw InputError("graph: self-loop at vertex " + std::to_string(u));
        if (i > offsets_[u] && neighbors_[i - 1] == v) {
          throw InputError("graph: duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
        }
        arcs.emplace_back(static_cast<VertexId>(u), v, edge_weight(static_cast<VertexId>(u), i - offsets_[u]));
      }
    }
    for (const auto& [u, v, w] : arcs) {
      const auto it = std::lower_bound(
          arcs.begin(), arcs.end(), std::make_pair(v, u), [](const auto& arc, const auto& key) {
            return std::make_pair(std::get<0>(arc), std::get<1>(arc)) < key;
          });
      if (it == arcs.end() || std::get<0>(*it) != v || std::get<1>(*it) != u) {
        throw InputError("graph: edge " + std::to_string(u) + "->" + std::to_string(v) +
                         " has no reverse edge");
      }
      if (std::get<2>(*it) != w) {
        throw InputError("graph: edge " + std::to_string(u) + "-" + std::to_string(v) +
                         " has asymmetric weights");
      }
    }
  }

 private:
  void sort_neighbor_lists() {
    if (offsets_.size() != coords_.size() + 1 || offsets_.back() != neighbors_.size()) return;
    if (!edge_weights_.empty() && edge_weights_.size() != neighbors_.size()) return;
    std::vector<std::pair<VertexId, double>> scratch;
    for (std::size_t v = 0; v + 1 < offsets_.size(); ++v) {
      const std::size_t begin = offsets_[v];
      const std::size_t end = offsets_[v + 1];
      if (end < begin || end > neighbors_.size()) return;
      if (std::is_sorted(neighbors_.begin() + begin, neighbors_.begin() + end)) continue;
      scratch.clear();
      for (std::size_t i = begin; i < end; ++i) {
        scratch.emplace_back(neighbors_[i], edge_weights_.empty() ? 1.0 : edge_weights_[i]);
      }
      std::sort(scratch.begin(), scratch.end());
      for (std::size_t i = begin; i < end; ++i) {
        neighbors_[i] = scratch[i - begin].first;
        if (!edge_weights_.empty()) edge_weights_[i] = scratch[i - begin].second;
      }
    }
  }

  std::vector<std::size_t> offsets_{0};
  std::vector<VertexId> neighbors_;
  std::vector<double> edge_weights_;
  std::vector<Point<D>> coords_;
  std::vector<double> vertex_weights_;
};

// Block assignment of every vertex; ids lie in [0, k).
struct Partition {
  std::vector<BlockId> assignment;
  BlockId k = 1;

  std::size_t size() const noexcept { return assignment.size(); }

  void validate() const {
    if (k < 1) throw InputError("partition: block count must be at least 1");
    for (std::size_t v = 0; v < assignment.size(); ++v) {
      if (assignment[v] < 0 || assignment[v] >= k) {
        throw InputError("partition: vertex " + std::to_string(v) + " has block id " +
                         std::to_string(assignment[v]) + " outside [0, " + std::to_string(k) +
                         ")");
      }
    }
  }

  std::vector<std::size_t> block_sizes() const {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (BlockId b : assignment) ++sizes[static_cast<std::size_t>(b)];
    return sizes;
  }

  bool has_empty_block() const {
    const auto sizes = block_sizes();
    return std::find(sizes.begin(), sizes.end(), std::size_t{0}) != sizes.end();
  }

  friend bool operator==(const Partition&, const Partition&) = default;
};

// max_c weight(c) / ceil(total / k) - 1, the relative overshoot over the
// per-block limit base.
inline double imbalance(std::span<const double> block_weights) {
  if (block_weights.empty()) throw InputError("imbalance: no blocks");
  double total = 0.0;
  double heaviest = 0.0;
  for (double w : block_weights) {
    total += w;
    heaviest = std::max(heaviest, w);
  }
  const double base = std::ceil(total / static_cast<double>(block_weights.size()));
  if (base <= 0.0) return 0.0;
  return heaviest / base - 1.0;
}

// Per-block weights of a partition.
template <std::size_t D>
std::vector<double> block_weights(const GeometricGraph<D>& graph, const Partition& part) {
  if (part.size() != graph.num_vertices()) {
    throw InputError("partition has " + std::to_string(part.size()) + " entries for " +
                     std::to_string(graph.num_vertices()) + " vertices");
  }
  part.validate();
  std::vector<double> weights(static_cast<std::size_t>(part.k), 0.0);
  for (std::size_t v = 0; v < part.size(); ++v) {
    weights[static_cast<std::size_t>(part.assignment[v])] += graph.vertex_weights()[v];
  }
  return weights;
}

}  // namespace geopart
