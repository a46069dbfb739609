#pragma once

// Balanced k-means over simulated ranks. Points are sorted along a Hilbert
// curve and redistributed, initial centers are spread evenly along the
// curve, and each movement iteration runs an assign-and-balance phase that
// adapts per-cluster influence until the block weights are within epsilon.
// Assignment skips the center scan when the Hamerly-style bounds prove the
// cluster unchanged, and cuts the scan short using the distance between a
// rank's bounding box and each center.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geopart/errors.hpp"
#include "geopart/exact_sum.hpp"
#include "geopart/geometry.hpp"
#include "geopart/graph.hpp"
#include "geopart/influence.hpp"
#include "geopart/parsim.hpp"

namespace geopart {

struct KMeansSettings {
  std::size_t k = 2;
  double epsilon = 0.03;
  std::size_t max_iter = 50;          // full-set movement iterations
  std::size_t max_balance_iter = 20;  // assign rounds per movement
  // Stop once every center moves less than this. Default: 1e-4 times the
  // diagonal of the global bounding box.
  std::optional<double> delta_threshold;
  double influence_step_cap = 0.05;
  bool erosion_enabled = true;
  // false pins every influence at 1 (plain Lloyd iterations).
  bool balance_enabled = true;
  // Initial sample per block for the doubling warm-up rounds; 0 disables them.
  std::size_t init_sample = 100;
  std::uint64_t seed = 0;
  unsigned sfc_depth = 0;  // 0 selects default_sfc_depth<D>
  // Recompute all effective distances for every visited point and count
  // bound violations. O(n k) per round; for tests.
  bool verify_bounds = false;
  // Record the weighted sum of squared point-to-center distances per iteration.
  bool record_objective = false;

  void validate() const {
    if (k < 1) throw InputError("k must be at least 1");
    if (!(epsilon >= 0.0)) throw InputError("epsilon must be nonnegative");
    if (max_iter < 1) throw InputError("max_iter must be at least 1");
    if (max_balance_iter < 1) throw InputError("max_balance_iter must be at least 1");
    if (!(influence_step_cap > 0.0 && influence_step_cap < 1.0)) {
      throw InputError("influence step cap must lie in (0, 1)");
    }
    if (delta_threshold && !(*delta_threshold >= 0.0)) {
      throw InputError("delta threshold must be nonnegative");
    }
  }
};

// Per-rank working data for one pipeline run.
template <std::size_t D>
struct LocalState {
  std::vector<BlockId> assignment;  // -1 until first assigned
  PointBounds bounds;
  std::vector<std::uint32_t> active;  // local indices taking part in the current round
  BoundingBox<D> box = BoundingBox<D>::empty();

  LocalState() = default;
  explicit LocalState(const Shard<D>& shard)
      : assignment(shard.size(), -1),
        bounds(shard.size()),
        active(shard.size()),
        box(bounding_box<D>(shard.points)) {
    for (std::size_t i = 0; i < active.size(); ++i) active[i] = static_cast<std::uint32_t>(i);
  }
};

template <std::size_t D>
std::vector<LocalState<D>> make_local_states(const RankWorld<D>& world) {
  std::vector<LocalState<D>> local;
  local.reserve(world.ranks());
  for (const auto& shard : world.shards()) local.emplace_back(shard);
  return local;
}

struct BoundCheck {
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;       // ub below the exact own distance, or lb above the exact second
  std::uint64_t shortcut_checks = 0;  // visits resolved by ub < lb
  std::uint64_t shortcut_errors = 0;  // ... where the exact argmin differs

  BoundCheck& operator+=(const BoundCheck& o) noexcept {
    checks += o.checks;
    violations += o.violations;
    shortcut_checks += o.shortcut_checks;
    shortcut_errors += o.shortcut_errors;
    return *this;
  }
};

struct BalanceOutcome {
  bool balanced = false;
  double imbalance = 0.0;
  std::size_t rounds = 0;
  std::uint64_t evaluations = 0;  // point visits over all rounds
  std::uint64_t skipped = 0;      // visits resolved without a center scan
};

struct IterationStats {
  bool sampled = false;
  std::size_t active_points = 0;
  std::size_t balance_rounds = 0;
  std::uint64_t evaluations = 0;
  std::uint64_t skipped = 0;
  double imbalance = 0.0;
  double max_move = 0.0;
  std::optional<double> objective;
};

template <std::size_t D>
struct KMeansResult {
  Partition partition;
  bool balanced = false;    // false: imbalance exceeds epsilon after the budget
  bool degenerate = false;  // some block is empty
  bool converged = false;   // stopped on the movement threshold
  double imbalance = 0.0;
  std::size_t iterations = 0;  // movement iterations including warm-up rounds
  ClusterState<D> final_state;  // the state the returned assignment was computed with
  std::vector<IterationStats> history;
  BoundCheck bound_check;
  CollectiveLog log;
};

// Center i is the point at global sorted position floor(i*n/k + n/(2k)).
template <std::size_t D>
ClusterState<D> initial_centers_from_sfc(RankWorld<D>& sorted_world, std::size_t k) {
  const std::size_t n = sorted_world.total_points();
  if (k == 0) throw InputError("k must be at least 1");
  if (k > n) {
    throw InputError("k = " + std::to_string(k) + " exceeds the point count " + std::to_string(n));
  }
  std::vector<Point<D>> centers;
  centers.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t pos = (2 * i * n + n) / (2 * k);
    for (const auto& shard : sorted_world.shards()) {
      if (pos < shard.size()) {
        centers.push_back(shard.points[pos]);
        break;
      }
      pos -= shard.size();
    }
  }
  sorted_world.log().gather.record(k * D);
  return ClusterState<D>(std::move(centers));
}

namespace detail {

struct RankCounters {
  std::uint64_t evaluations = 0;
  std::uint64_t skipped = 0;
  BoundCheck check;
};

template <std::size_t D>
void verify_point(const Point<D>& p, BlockId own, double ub, double lb, bool shortcut,
                  const ClusterState<D>& state, BoundCheck& check) {
  double best = std::numeric_limits<double>::infinity();
  double second = best;
  std::size_t best_index = 0;
  double own_value = 0.0;
  for (std::size_t c = 0; c < state.k(); ++c) {
    const double e = effective_distance(p, c, state);
    if (static_cast<BlockId>(c) == own) own_value = e;
    if (e < best) {
      second = best;
      best = e;
      best_index = c;
    } else if (e < second) {
      second = e;
    }
  }
  ++check.checks;
  if ((own >= 0 && ub < own_value) || lb > second) ++check.violations;
  if (shortcut) {
    ++check.shortcut_checks;
    if (static_cast<BlockId>(best_index) != own) ++check.shortcut_errors;
  }
}

template <std::size_t D>
void assign_rank(const Shard<D>& shard, LocalState<D>& local, const ClusterState<D>& state,
                 bool verify, std::vector<ExactSum>& sizes, RankCounters& counters) {
  const std::size_t k = state.k();
  // Candidate centers ordered by a lower bound on the effective distance of
  // any local point to them.
  std::vector<std::pair<double, std::size_t>> candidates(k);
  for (std::size_t c = 0; c < k; ++c) {
    const double to_box = local.box.valid()
                              ? min_distance_point_box(local.box, state.centers[c])
                              : 0.0;
    candidates[c] = {to_box / state.influence[c], c};
  }
  std::sort(candidates.begin(), candidates.end());

  for (const std::uint32_t i : local.active) {
    const Point<D>& p = shard.points[i];
    BlockId& own = local.assignment[i];
    double& ub = local.bounds.ub[i];
    double& lb = local.bounds.lb[i];
    const bool shortcut = own >= 0 && ub < lb;
    if (verify) verify_point(p, own, ub, lb, shortcut, state, counters.check);
    ++counters.evaluations;
    if (shortcut) {
      ++counters.skipped;
    } else {
      double best = std::numeric_limits<double>::infinity();
      double second = best;
      std::size_t best_index = k;
      for (const auto& [to_box, c] : candidates) {
        if (to_box > second) break;
        const double e = effective_distance(p, c, state);
        if (e < best || (e == best && c < best_index)) {
          second = best;
          best = e;
          best_index = c;
        } else if (e < second) {
          second = e;
        }
      }
      own = static_cast<BlockId>(best_index);
      ub = best;
      lb = second;
    }
    sizes[static_cast<std::size_t>(own)] += shard.weights[i];
  }
}

inline double unit_hash(std::uint64_t seed, std::uint64_t id) noexcept {
  std::uint64_t z = seed ^ (id * 0x9E3779B97F4A7C15ull);
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace detail

// One assign-and-balance phase: assign the active points of every rank to
// their minimal effective distance cluster, reduce block weights, and if the
// imbalance exceeds epsilon adapt influences, relax bounds and repeat (up to
// max_balance_iter rounds). Influences are only adapted when another round
// follows, so on return every active point is in an effective-distance
// minimal cluster under `state`. Ties go to the lower cluster index.
template <std::size_t D>
BalanceOutcome assign_and_balance(RankWorld<D>& world, ClusterState<D>& state,
                                  std::vector<LocalState<D>>& local,
                                  const KMeansSettings& settings, double slack = 0.0,
                                  BoundCheck* check = nullptr) {
  const std::size_t k = state.k();
  if (k == 0) throw InputError("assign_and_balance: k must be at least 1");
  if (local.size() != world.ranks()) {
    throw InputError("assign_and_balance: expected one local state per rank");
  }
  const std::size_t p = world.ranks();
  const bool verify = settings.verify_bounds || check != nullptr;
  BalanceOutcome outcome;

  for (std::size_t round = 0; round < settings.max_balance_iter; ++round) {
    std::vector<std::vector<ExactSum>> sizes(p, std::vector<ExactSum>(k));
    std::vector<detail::RankCounters> counters(p);
    world.run([&](std::size_t r) {
      detail::assign_rank(world.shard(r), local[r], state, verify, sizes[r], counters[r]);
    });
    state.block_weights = allreduce_sum(world, std::span<const std::vector<ExactSum>>(sizes));
    for (const auto& c : counters) {
      outcome.evaluations += c.evaluations;
      outcome.skipped += c.skipped;
      if (check != nullptr) *check += c.check;
    }
    ++outcome.rounds;

    double total = 0.0;
    for (double w : state.block_weights) total += w;
    outcome.imbalance = total > 0.0 ? imbalance(state.block_weights) : 0.0;
    outcome.balanced = outcome.imbalance <= settings.epsilon;
    if (outcome.balanced || !settings.balance_enabled || round + 1 == settings.max_balance_iter) {
      break;
    }

    const ClusterState<D> before = state;
    const std::vector<double> targets(k, total / static_cast<double>(k));
    state = adapt_influence<D>(std::move(state), targets, settings.influence_step_cap);
    world.run([&](std::size_t r) {
      relax_bounds(local[r].bounds, local[r].assignment, before, state, slack);
    });
  }
  return outcome;
}

// Full pipeline over a world holding the graph's vertices.
template <std::size_t D>
  requires SupportedDimension<D>
KMeansResult<D> balanced_kmeans(const GeometricGraph<D>& graph, const KMeansSettings& settings,
                                RankWorld<D> world) {
  settings.validate();
  const std::size_t n = graph.num_vertices();
  const std::size_t k = settings.k;
  if (k > n) {
    throw InputError("k = " + std::to_string(k) + " exceeds the vertex count " + std::to_string(n));
  }
  if (world.total_points() != n) throw InputError("world does not hold the graph's vertices");
  const std::size_t p = world.ranks();

  // Hilbert keys, global sort and redistribution.
  const auto box = global_bounding_box(world);
  const unsigned depth = settings.sfc_depth != 0 ? settings.sfc_depth : default_sfc_depth<D>;
  std::vector<std::vector<std::uint64_t>> keys(p);
  world.run([&](std::size_t r) {
    const auto& shard = world.shard(r);
    keys[r].resize(shard.size());
    for (std::size_t i = 0; i < shard.size(); ++i) {
      keys[r][i] = hilbert_key<D>(shard.points[i], box, depth).value;
    }
  });
  world = global_sort_redistribute(world, std::span<const std::vector<std::uint64_t>>(keys));

  ClusterState<D> state = initial_centers_from_sfc(world, k);
  auto local = make_local_states(world);

  const double threshold = settings.delta_threshold.value_or(1e-4 * box.diagonal());
  double scale = box.diagonal();
  for (std::size_t i = 0; i < D; ++i) {
    scale += std::max(std::fabs(box.min[i]), std::fabs(box.max[i]));
  }
  const double slack = 1e-12 * scale;

  // Warm-up rounds on nested random samples whose expected size doubles from
  // init_sample points per block. Membership hashes the global id, so the
  // sample does not depend on the rank count.
  std::size_t warmup = 0;
  const double first_sample = static_cast<double>(settings.init_sample * k);
  if (settings.init_sample > 0 && static_cast<double>(n) > first_sample) {
    warmup = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n) / first_sample)));
  }
  std::vector<std::vector<double>> priority(p);
  world.run([&](std::size_t r) {
    const auto& shard = world.shard(r);
    priority[r].resize(shard.size());
    for (std::size_t i = 0; i < shard.size(); ++i) {
      priority[r][i] = detail::unit_hash(settings.seed, shard.global_ids[i]);
    }
  });

  KMeansResult<D> result;
  BoundCheck* check = settings.verify_bounds ? &result.bound_check : nullptr;
  const std::size_t total_iterations = warmup + settings.max_iter;
  BalanceOutcome outcome;

  for (std::size_t it = 0; it < total_iterations; ++it) {
    const bool sampled = it < warmup;
    const double fraction =
        sampled ? std::min(1.0, first_sample * std::ldexp(1.0, static_cast<int>(it)) /
                                    static_cast<double>(n))
                : 1.0;
    world.run([&](std::size_t r) {
      auto& active = local[r].active;
      active.clear();
      for (std::size_t i = 0; i < priority[r].size(); ++i) {
        if (!sampled || priority[r][i] < fraction) active.push_back(static_cast<std::uint32_t>(i));
      }
    });

    outcome = assign_and_balance(world, state, local, settings, slack, check);
    result.final_state = state;

    IterationStats stats;
    stats.sampled = sampled;
    stats.balance_rounds = outcome.rounds;
    stats.evaluations = outcome.evaluations;
    stats.skipped = outcome.skipped;
    stats.imbalance = outcome.imbalance;
    for (const auto& l : local) stats.active_points += l.active.size();

    // Partial sums for the weighted means, the objective and the per-cluster
    // maximum distance (cluster extent for erosion).
    std::vector<std::vector<ExactSum>> sums(p, std::vector<ExactSum>(k * D));
    std::vector<std::vector<ExactSum>> weights(p, std::vector<ExactSum>(k));
    std::vector<std::vector<ExactSum>> objective(p, std::vector<ExactSum>(1));
    std::vector<std::vector<double>> extent(p, std::vector<double>(k, 0.0));
    world.run([&](std::size_t r) {
      const auto& shard = world.shard(r);
      for (const std::uint32_t i : local[r].active) {
        const auto c = static_cast<std::size_t>(local[r].assignment[i]);
        const double w = shard.weights[i];
        for (std::size_t d = 0; d < D; ++d) sums[r][c * D + d] += w * shard.points[i][d];
        weights[r][c] += w;
        const double sq = squared_distance(shard.points[i], state.centers[c]);
        extent[r][c] = std::max(extent[r][c], std::sqrt(sq));
        if (settings.record_objective) objective[r][0] += w * sq;
      }
    });
    if (settings.record_objective) {
      stats.objective =
          allreduce_sum(world, std::span<const std::vector<ExactSum>>(objective)).front();
    }
    const auto means = weighted_mean_reduce(world, std::span<const std::vector<ExactSum>>(sums),
                                            std::span<const std::vector<ExactSum>>(weights));

    ClusterState<D> moved = state;
    double max_move = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (means[c]) {
        moved.last_move[c] = distance(state.centers[c], *means[c]);
        moved.centers[c] = *means[c];
      } else {
        moved.last_move[c] = 0.0;
        if (settings.balance_enabled) moved.influence[c] *= 1.0 + settings.influence_step_cap;
      }
      max_move = std::max(max_move, moved.last_move[c]);
    }
    stats.max_move = max_move;
    result.history.push_back(stats);
    result.iterations = it + 1;

    const bool settled = outcome.balanced || !settings.balance_enabled;
    if (!sampled && max_move < threshold && settled) {
      result.converged = true;
      break;
    }
    if (it + 1 == total_iterations) break;

    if (settings.erosion_enabled) {
      const auto extents = allreduce_max(world, std::span<const std::vector<double>>(extent));
      double beta = 0.0;
      std::size_t populated = 0;
      for (std::size_t c = 0; c < k; ++c) {
        if (!means[c]) continue;
        beta += 2.0 * extents[c];
        ++populated;
      }
      if (populated > 0) beta /= static_cast<double>(populated);
      if (beta > 0.0) moved = erode_influence<D>(std::move(moved), beta);
    }
    world.run([&](std::size_t r) {
      relax_bounds(local[r].bounds, local[r].assignment, state, moved, slack);
    });
    state = std::move(moved);
  }

  result.partition.k = static_cast<BlockId>(k);
  result.partition.assignment.assign(n, 0);
  for (std::size_t r = 0; r < p; ++r) {
    const auto& shard = world.shard(r);
    for (std::size_t i = 0; i < shard.size(); ++i) {
      result.partition.assignment[shard.global_ids[i]] = local[r].assignment[i];
    }
  }
  result.imbalance = outcome.imbalance;
  result.balanced = outcome.balanced;
  result.degenerate = result.partition.has_empty_block();
  result.log = world.log();
  return result;
}

template <std::size_t D>
  requires SupportedDimension<D>
KMeansResult<D> balanced_kmeans(const GeometricGraph<D>& graph, const KMeansSettings& settings,
                                std::size_t ranks = 1) {
  return balanced_kmeans(graph, settings, RankWorld<D>::distribute(graph, ranks));
}

}  // namespace geopart
