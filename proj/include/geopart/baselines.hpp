#pragma once

// Reference geometric partitioners: recursive coordinate bisection and
// contiguous cuts along the Hilbert curve.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "geopart/errors.hpp"
#include "geopart/geometry.hpp"
#include "geopart/graph.hpp"

namespace geopart {

namespace detail {

template <std::size_t D>
void check_block_count(const GeometricGraph<D>& graph, std::size_t k) {
  if (k < 1) throw InputError("k must be at least 1");
  if (k > graph.num_vertices()) {
    throw InputError("k = " + std::to_string(k) + " exceeds the vertex count " +
                     std::to_string(graph.num_vertices()));
  }
}

template <std::size_t D>
void bisect(const GeometricGraph<D>& graph, std::vector<VertexId>& order, std::size_t begin,
            std::size_t end, std::size_t k, BlockId first_block, Partition& part) {
  if (k == 1) {
    for (std::size_t i = begin; i < end; ++i) part.assignment[order[i]] = first_block;
    return;
  }
  const auto& coords = graph.coords();
  const auto& weights = graph.vertex_weights();

  auto box = BoundingBox<D>::empty();
  for (std::size_t i = begin; i < end; ++i) box.extend(coords[order[i]]);
  std::size_t axis = 0;
  for (std::size_t a = 1; a < D; ++a) {
    if (box.max[a] - box.min[a] > box.max[axis] - box.min[axis]) axis = a;
  }
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
            order.begin() + static_cast<std::ptrdiff_t>(end), [&](VertexId a, VertexId b) {
              return coords[a][axis] != coords[b][axis] ? coords[a][axis] < coords[b][axis]
                                                        : a < b;
            });

  const std::size_t k_left = (k + 1) / 2;
  const std::size_t k_right = k - k_left;
  double total = 0.0;
  for (std::size_t i = begin; i < end; ++i) total += weights[order[i]];
  const double target = total * static_cast<double>(k_left) / static_cast<double>(k);

  // Prefix closest to the target weight; each side keeps at least one
  // vertex per block it must host.
  const std::size_t lo = begin + k_left;
  const std::size_t hi = end - k_right;
  std::size_t split = lo;
  double prefix = 0.0;
  for (std::size_t i = begin; i < lo; ++i) prefix += weights[order[i]];
  double best_gap = std::fabs(prefix - target);
  for (std::size_t cut = lo + 1; cut <= hi; ++cut) {
    prefix += weights[order[cut - 1]];
    const double gap = std::fabs(prefix - target);
    if (gap < best_gap) {
      best_gap = gap;
      split = cut;
    }
    if (prefix > target) break;
  }
  bisect(graph, order, begin, split, k_left, first_block, part);
  bisect(graph, order, split, end, k_right, first_block + static_cast<BlockId>(k_left), part);
}

}  // namespace detail

// Recursive coordinate bisection: split along the axis of largest extent at
// the weighted position matching the left side's share of blocks
// (ceil(k/2) of k). Equal coordinates are ordered by vertex id. `epsilon`
// is the balance tolerance callers check the result against; the exact
// median splits themselves do not need it.
template <std::size_t D>
  requires SupportedDimension<D>
Partition rcb_partition(const GeometricGraph<D>& graph, std::size_t k, double epsilon = 0.03) {
  detail::check_block_count(graph, k);
  if (!(epsilon >= 0.0)) throw InputError("epsilon must be nonnegative");
  Partition part;
  part.k = static_cast<BlockId>(k);
  part.assignment.assign(graph.num_vertices(), 0);
  std::vector<VertexId> order(graph.num_vertices());
  std::iota(order.begin(), order.end(), VertexId{0});
  detail::bisect(graph, order, 0, order.size(), k, 0, part);
  return part;
}

// Sorts vertices by Hilbert key (ties by id) and cuts the sequence into k
// contiguous chunks: a vertex whose weight interval midpoint lies in
// [j*W/k, (j+1)*W/k) goes to block j.
template <std::size_t D>
  requires SupportedDimension<D>
Partition sfc_partition(const GeometricGraph<D>& graph, std::size_t k,
                        unsigned depth = default_sfc_depth<D>) {
  detail::check_block_count(graph, k);
  const std::size_t n = graph.num_vertices();
  const auto box = bounding_box<D>(graph.coords());
  std::vector<std::pair<std::uint64_t, VertexId>> keyed(n);
  for (std::size_t v = 0; v < n; ++v) {
    keyed[v] = {hilbert_key<D>(graph.coords()[v], box, depth).value, static_cast<VertexId>(v)};
  }
  std::sort(keyed.begin(), keyed.end());

  Partition part;
  part.k = static_cast<BlockId>(k);
  part.assignment.assign(n, 0);
  const double total = graph.total_weight();
  double prefix = 0.0;
  for (const auto& [key, v] : keyed) {
    const double w = graph.vertex_weights()[v];
    const double mid = (prefix + 0.5 * w) * static_cast<double>(k) / total;
    const auto block = std::min(static_cast<std::size_t>(mid), k - 1);
    part.assignment[v] = static_cast<BlockId>(block);
    prefix += w;
  }
  return part;
}

}  // namespace geopart
