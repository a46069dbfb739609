#pragma once

// Cluster state for balanced k-means: centers with multiplicative influence
// values, and per-point distance bounds that stay valid while centers move
// and influences change.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "geopart/errors.hpp"
#include "geopart/geometry.hpp"
#include "geopart/graph.hpp"

namespace geopart {

template <std::size_t D>
struct ClusterState {
  std::vector<Point<D>> centers;
  std::vector<double> influence;      // > 0, starts at 1
  std::vector<double> block_weights;  // global weight per cluster, last assignment
  std::vector<double> last_move;      // distance each center moved in the last movement

  ClusterState() = default;

  explicit ClusterState(std::vector<Point<D>> initial_centers)
      : centers(std::move(initial_centers)),
        influence(centers.size(), 1.0),
        block_weights(centers.size(), 0.0),
        last_move(centers.size(), 0.0) {}

  std::size_t k() const noexcept { return centers.size(); }
};

// dist(p, center) / influence. Minimizing it over clusters yields a
// multiplicatively weighted Voronoi diagram.
template <std::size_t D>
double effective_distance(const Point<D>& p, std::size_t cluster, const ClusterState<D>& state) {
  return distance(p, state.centers[cluster]) / state.influence[cluster];
}

// Scales each influence by (target/current)^(1/d), with the multiplicative
// change clamped to [1 - cap, 1 + cap]. Oversized clusters lose influence,
// undersized ones gain it; an empty cluster gains the full cap.
template <std::size_t D>
ClusterState<D> adapt_influence(ClusterState<D> state, std::span<const double> target_weights,
                                double cap = 0.05) {
  if (!(cap > 0.0 && cap < 1.0)) throw InputError("adapt_influence: cap must lie in (0, 1)");
  if (target_weights.size() != state.k() || state.block_weights.size() != state.k()) {
    throw InputError("adapt_influence: expected one target and one weight per cluster");
  }
  for (std::size_t c = 0; c < state.k(); ++c) {
    const double target = target_weights[c];
    if (!(target > 0.0)) throw InputError("adapt_influence: targets must be positive");
    const double current = state.block_weights[c];
    double factor = 1.0 + cap;
    if (current > 0.0) {
      factor = std::pow(target / current, 1.0 / static_cast<double>(D));
      factor = std::clamp(factor, 1.0 - cap, 1.0 + cap);
    }
    state.influence[c] *= factor;
  }
  return state;
}

// Sigmoid erosion factor for a center that moved `moved`, relative to the
// scale `beta`: 0 for no movement, approaching 1 for large moves.
inline double erosion_factor(double moved, double beta) {
  if (!(beta > 0.0)) throw InputError("erosion_factor: beta must be positive");
  return 2.0 / (1.0 + std::exp(-moved / beta)) - 1.0;
}

// influence <- influence^(1 - alpha(c)) using last_move as the movement.
template <std::size_t D>
ClusterState<D> erode_influence(ClusterState<D> state, double beta) {
  if (!(beta > 0.0)) throw InputError("erode_influence: beta must be positive");
  if (state.last_move.size() != state.k()) {
    throw InputError("erode_influence: last_move must hold one value per cluster");
  }
  for (std::size_t c = 0; c < state.k(); ++c) {
    const double alpha = erosion_factor(state.last_move[c], beta);
    state.influence[c] = std::exp((1.0 - alpha) * std::log(state.influence[c]));
  }
  return state;
}

// ub: upper bound on the effective distance to the point's own cluster.
// lb: lower bound on the second-smallest effective distance over all clusters.
struct PointBounds {
  std::vector<double> ub;
  std::vector<double> lb;

  PointBounds() = default;
  explicit PointBounds(std::size_t n)
      : ub(n, std::numeric_limits<double>::infinity()), lb(n, 0.0) {}

  std::size_t size() const noexcept { return ub.size(); }
};

// Relaxes bounds after centers moved and/or influences changed between
// `before` and `after`:
//   ub' = ub * I_old(c)/I_new(c) + delta(c)/I_new(c)        (c = own cluster)
//   lb' = lb * min_c' I_old/I_new - max_c' delta(c')/I_new(c'), floored at 0
// `slack` (absolute, in coordinate units) widens both bounds to absorb
// rounding in the triangle inequality; 0 gives the exact formula. Points
// with a negative assignment have no own cluster and keep ub as is.
template <std::size_t D>
void relax_bounds(PointBounds& bounds, std::span<const BlockId> assignment,
                  const ClusterState<D>& before, const ClusterState<D>& after,
                  double slack = 0.0) {
  const std::size_t k = before.k();
  if (after.k() != k) throw InputError("relax_bounds: states differ in cluster count");
  if (assignment.size() != bounds.size()) {
    throw InputError("relax_bounds: assignment and bounds differ in length");
  }
  constexpr double kRounding = 4.0 * std::numeric_limits<double>::epsilon();

  std::vector<double> ratio(k);
  std::vector<double> shift(k);
  std::vector<char> changed(k);
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_shift = 0.0;
  bool any_change = false;
  for (std::size_t c = 0; c < k; ++c) {
    const double moved = distance(before.centers[c], after.centers[c]);
    changed[c] = moved > 0.0 || before.influence[c] != after.influence[c];
    any_change = any_change || changed[c];
    const double pad = changed[c] ? slack : 0.0;
    ratio[c] = before.influence[c] / after.influence[c];
    shift[c] = (moved + pad) / after.influence[c];
    min_ratio = std::min(min_ratio, ratio[c]);
    max_shift = std::max(max_shift, shift[c]);
  }
  if (!any_change) return;
  const double grow = slack > 0.0 ? 1.0 + kRounding : 1.0;
  const double shrink = slack > 0.0 ? 1.0 - kRounding : 1.0;

  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const BlockId own = assignment[i];
    if (own >= 0 && changed[static_cast<std::size_t>(own)]) {
      const auto c = static_cast<std::size_t>(own);
      bounds.ub[i] = bounds.ub[i] * ratio[c] * grow + shift[c];
    }
    const double relaxed = bounds.lb[i] * min_ratio * shrink - max_shift;
    bounds.lb[i] = relaxed > 0.0 ? relaxed : 0.0;
  }
}

}  // namespace geopart
