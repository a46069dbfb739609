#pragma once

// Desk-scale meshes: random geometric graphs in the unit square/cube and
// regular lattice grids.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "geopart/errors.hpp"
#include "geopart/graph.hpp"

namespace geopart {

// Uniform double in [0, 1) from the top 53 bits of a 64-bit engine output.
// Used instead of std::uniform_real_distribution so streams are identical
// across standard library implementations.
inline double unit_uniform(std::mt19937_64& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Connection radius giving the requested expected degree for n uniform
// points in the unit hypercube, ignoring boundary effects.
template <std::size_t D>
  requires SupportedDimension<D>
double rgg_radius(std::size_t n, double avg_degree) {
  if (!(avg_degree > 0.0)) throw InputError("rgg_radius: average degree must be positive");
  const double per_point = avg_degree / static_cast<double>(n);
  if constexpr (D == 2) {
    return std::sqrt(per_point / std::numbers::pi);
  } else {
    return std::cbrt(3.0 * per_point / (4.0 * std::numbers::pi));
  }
}

// Connects every pair of points within `radius` (inclusive). Neighbor search
// runs over a uniform cell grid whose cell side is at least the radius, so
// only adjacent cells need to be inspected.
template <std::size_t D>
  requires SupportedDimension<D>
GeometricGraph<D> random_geometric_graph_from_points(std::vector<Point<D>> points, double radius) {
  const std::size_t n = points.size();
  if (n < 2) throw InputError("random geometric graph needs at least 2 points");
  if (!(radius > 0.0)) throw InputError("random geometric graph radius must be positive");

  const auto box = bounding_box<D>(points);
  double span = 0.0;
  for (std::size_t i = 0; i < D; ++i) span = std::max(span, box.max[i] - box.min[i]);
  const auto cap = static_cast<std::size_t>(std::pow(static_cast<double>(n), 1.0 / D)) + 1;
  std::size_t cells = span > 0.0 ? static_cast<std::size_t>(span / radius) : 1;
  cells = std::clamp<std::size_t>(cells, 1, cap);
  const double cell_side = span > 0.0 ? span / static_cast<double>(cells) : 1.0;

  auto cell_coord = [&](const Point<D>& p, std::size_t axis) {
    const auto c = static_cast<std::size_t>((p[axis] - box.min[axis]) / cell_side);
    return std::min(c, cells - 1);
  };
  std::size_t total_cells = 1;
  for (std::size_t i = 0; i < D; ++i) total_cells *= cells;

  std::vector<std::size_t> cell_of(n);
  std::vector<std::size_t> start(total_cells + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t id = 0;
    for (std::size_t i = D; i-- > 0;) id = id * cells + cell_coord(points[v], i);
    cell_of[v] = id;
    ++start[id + 1];
  }
  for (std::size_t c = 0; c < total_cells; ++c) start[c + 1] += start[c];
  std::vector<VertexId> members(n);
  {
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t v = 0; v < n; ++v) members[fill[cell_of[v]]++] = static_cast<VertexId>(v);
  }

  const double r2 = radius * radius;
  std::vector<WeightedEdge> edges;
  std::array<std::size_t, D> home{};
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t i = 0; i < D; ++i) home[i] = cell_coord(points[v], i);
    std::array<int, D> offset{};
    offset.fill(-1);
    while (true) {
      bool inside = true;
      std::size_t id = 0;
      for (std::size_t i = D; i-- > 0;) {
        const auto c = static_cast<std::ptrdiff_t>(home[i]) + offset[i];
        if (c < 0 || c >= static_cast<std::ptrdiff_t>(cells)) {
          inside = false;
          break;
        }
        id = id * cells + static_cast<std::size_t>(c);
      }
      if (inside) {
        for (std::size_t j = start[id]; j < start[id + 1]; ++j) {
          const VertexId u = members[j];
          if (u > v && squared_distance(points[v], points[u]) <= r2) {
            edges.push_back({static_cast<VertexId>(v), u, 1.0});
          }
        }
      }
      std::size_t axis = 0;
      while (axis < D && offset[axis] == 1) offset[axis++] = -1;
      if (axis == D) break;
      ++offset[axis];
    }
  }
  return GeometricGraph<D>::from_edges(n, edges, std::move(points));
}

template <std::size_t D>
  requires SupportedDimension<D>
GeometricGraph<D> random_geometric_graph(std::size_t n, double avg_degree, std::uint64_t seed) {
  if (n < 2) throw InputError("random geometric graph needs at least 2 vertices");
  std::mt19937_64 rng(seed);
  std::vector<Point<D>> points(n);
  for (auto& p : points) {
    for (auto& x : p) x = unit_uniform(rng);
  }
  return random_geometric_graph_from_points<D>(std::move(points), rgg_radius<D>(n, avg_degree));
}

// side^D vertices on the integer lattice, linked to their axis neighbors.
// Vertex ids run with axis 0 fastest.
template <std::size_t D>
  requires SupportedDimension<D>
GeometricGraph<D> grid_mesh(std::size_t side) {
  if (side < 2) throw InputError("grid mesh side must be at least 2");
  std::size_t n = 1;
  for (std::size_t i = 0; i < D; ++i) n *= side;
  std::vector<Point<D>> coords(n);
  std::vector<WeightedEdge> edges;
  edges.reserve(D * n);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t rest = v;
    std::size_t stride = 1;
    for (std::size_t i = 0; i < D; ++i) {
      const std::size_t c = rest % side;
      rest /= side;
      coords[v][i] = static_cast<double>(c);
      if (c + 1 < side) {
        edges.push_back({static_cast<VertexId>(v), static_cast<VertexId>(v + stride), 1.0});
      }
      stride *= side;
    }
  }
  return GeometricGraph<D>::from_edges(n, edges, std::move(coords));
}

}  // namespace geopart
