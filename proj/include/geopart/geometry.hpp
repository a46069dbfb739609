#pragma once

// Points, axis-aligned boxes, Euclidean distances and Hilbert curve keys
// for 2D and 3D coordinates.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>

#include "geopart/errors.hpp"

namespace geopart {

template <std::size_t D>
concept SupportedDimension = (D == 2 || D == 3);

template <std::size_t D>
using Point = std::array<double, D>;

template <std::size_t D>
constexpr double squared_distance(const Point<D>& a, const Point<D>& b) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < D; ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

// Runtime-dimension variant for callers holding raw coordinate rows.
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("squared_distance: dimension mismatch (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

template <std::size_t D>
double distance(const Point<D>& a, const Point<D>& b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

template <std::size_t D>
bool is_finite(const Point<D>& p) noexcept {
  return std::all_of(p.begin(), p.end(), [](double x) { return std::isfinite(x); });
}

template <std::size_t D>
struct BoundingBox {
  Point<D> min;
  Point<D> max;

  // An inverted box that any extend() call turns into a valid one.
  static BoundingBox empty() noexcept {
    BoundingBox box;
    box.min.fill(std::numeric_limits<double>::infinity());
    box.max.fill(-std::numeric_limits<double>::infinity());
    return box;
  }

  bool valid() const noexcept {
    for (std::size_t i = 0; i < D; ++i) {
      if (!(min[i] <= max[i])) return false;
    }
    return true;
  }

  void extend(const Point<D>& p) noexcept {
    for (std::size_t i = 0; i < D; ++i) {
      min[i] = std::min(min[i], p[i]);
      max[i] = std::max(max[i], p[i]);
    }
  }

  void extend(const BoundingBox& other) noexcept {
    if (!other.valid()) return;
    extend(other.min);
    extend(other.max);
  }

  bool contains(const Point<D>& p) const noexcept {
    for (std::size_t i = 0; i < D; ++i) {
      if (p[i] < min[i] || p[i] > max[i]) return false;
    }
    return true;
  }

  double diagonal() const noexcept { return valid() ? distance(min, max) : 0.0; }
};

template <std::size_t D>
BoundingBox<D> bounding_box(std::span<const Point<D>> points) noexcept {
  auto box = BoundingBox<D>::empty();
  for (const auto& p : points) box.extend(p);
  return box;
}

// Smallest Euclidean distance from p to any point of the box; 0 inside.
template <std::size_t D>
double min_distance_point_box(const BoundingBox<D>& box, const Point<D>& p) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < D; ++i) {
    double gap = 0.0;
    if (p[i] < box.min[i]) {
      gap = box.min[i] - p[i];
    } else if (p[i] > box.max[i]) {
      gap = p[i] - box.max[i];
    }
    sum += gap * gap;
  }
  return std::sqrt(sum);
}

// Position along the Hilbert curve of a cell in a 2^depth-per-axis grid.
struct SfcKey {
  std::uint64_t value = 0;
  unsigned depth = 0;

  auto operator<=>(const SfcKey&) const = default;
};

// Largest depth with single-word keys: d * depth <= 62.
template <std::size_t D>
inline constexpr unsigned default_sfc_depth = 62 / D;

template <std::size_t D>
constexpr unsigned max_sfc_depth = std::min<unsigned>(32, 64 / D);

namespace detail {

template <std::size_t D>
void check_sfc_depth(unsigned depth) {
  if (depth == 0) throw InputError("hilbert key depth must be positive");
  if (depth > max_sfc_depth<D>) {
    throw InputError("hilbert key depth " + std::to_string(depth) + " exceeds " +
                     std::to_string(max_sfc_depth<D>) + " for dimension " + std::to_string(D));
  }
}

}  // namespace detail

// Index of an integer grid cell along the Hilbert curve. Uses Skilling's
// transpose formulation (Gray code plus per-level axis exchange/inversion),
// which is valid for any dimension; consecutive indices are face-adjacent.
template <std::size_t D>
  requires SupportedDimension<D>
std::uint64_t hilbert_index(std::array<std::uint32_t, D> cell, unsigned depth) {
  detail::check_sfc_depth<D>(depth);
  const std::uint32_t top = std::uint32_t{1} << (depth - 1);
  for (std::size_t i = 0; i < D; ++i) {
    if (depth < 32 && (cell[i] >> depth) != 0) {
      throw InputError("hilbert_index: cell coordinate out of range for depth");
    }
  }

  // Inverse undo of the per-level rotations.
  for (std::uint32_t q = top; q > 1; q >>= 1) {
    const std::uint32_t low = q - 1;
    for (std::size_t i = 0; i < D; ++i) {
      if (cell[i] & q) {
        cell[0] ^= low;
      } else {
        const std::uint32_t t = (cell[0] ^ cell[i]) & low;
        cell[0] ^= t;
        cell[i] ^= t;
      }
    }
  }

  // Gray encode.
  for (std::size_t i = 1; i < D; ++i) cell[i] ^= cell[i - 1];
  std::uint32_t flip = 0;
  for (std::uint32_t q = top; q > 1; q >>= 1) {
    if (cell[D - 1] & q) flip ^= q - 1;
  }
  for (std::size_t i = 0; i < D; ++i) cell[i] ^= flip;

  // Interleave the transposed bits, axis 0 most significant.
  std::uint64_t key = 0;
  for (int bit = static_cast<int>(depth) - 1; bit >= 0; --bit) {
    for (std::size_t i = 0; i < D; ++i) {
      key = (key << 1) | ((cell[i] >> bit) & 1u);
    }
  }
  return key;
}

// Grid cell of p in the 2^depth-per-axis subdivision of box. Points on the
// upper faces land in the last cell; points outside the box by more than a
// relative tolerance of 1e-9 are rejected.
template <std::size_t D>
  requires SupportedDimension<D>
std::array<std::uint32_t, D> grid_cell(const Point<D>& p, const BoundingBox<D>& box,
                                       unsigned depth) {
  detail::check_sfc_depth<D>(depth);
  if (!box.valid()) throw InputError("grid_cell: invalid bounding box");
  const double cells = std::ldexp(1.0, static_cast<int>(depth));
  const auto last = static_cast<std::uint64_t>(cells) - 1;
  std::array<std::uint32_t, D> cell{};
  for (std::size_t i = 0; i < D; ++i) {
    if (!std::isfinite(p[i])) throw InputError("grid_cell: non-finite coordinate");
    const double extent = box.max[i] - box.min[i];
    const double tolerance = 1e-9 * (extent > 0.0 ? extent : 1.0);
    if (p[i] < box.min[i] - tolerance || p[i] > box.max[i] + tolerance) {
      throw InputError("grid_cell: point lies outside the bounding box");
    }
    if (extent <= 0.0) {
      cell[i] = 0;
      continue;
    }
    const double scaled = std::floor((p[i] - box.min[i]) / extent * cells);
    const double clamped = std::clamp(scaled, 0.0, static_cast<double>(last));
    cell[i] = static_cast<std::uint32_t>(clamped);
  }
  return cell;
}

template <std::size_t D>
  requires SupportedDimension<D>
SfcKey hilbert_key(const Point<D>& p, const BoundingBox<D>& box,
                   unsigned depth = default_sfc_depth<D>) {
  return SfcKey{hilbert_index<D>(grid_cell<D>(p, box, depth), depth), depth};
}

}  // namespace geopart
