#pragma once

// Simulated distributed execution. A RankWorld holds p logical ranks, each
// owning a shard of the points. Ranks run independently between collectives;
// collectives merge per-rank contributions in a fixed order, so results never
// depend on scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "geopart/errors.hpp"
#include "geopart/exact_sum.hpp"
#include "geopart/geometry.hpp"
#include "geopart/graph.hpp"

namespace geopart {

// Counts and element volumes per collective type.
struct CollectiveLog {
  struct Entry {
    std::uint64_t count = 0;
    std::uint64_t volume = 0;

    void record(std::uint64_t elements) noexcept {
      ++count;
      volume += elements;
    }
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  Entry sum_reduce;
  Entry max_reduce;
  Entry sort_redistribute;
  Entry gather;

  void dump(std::ostream& out) const {
    auto line = [&](const char* name, const Entry& e) {
      out << name << ": count=" << e.count << " volume=" << e.volume << '\n';
    };
    line("sum_reduce", sum_reduce);
    line("max_reduce", max_reduce);
    line("sort_redistribute", sort_redistribute);
    line("gather", gather);
  }

  friend bool operator==(const CollectiveLog&, const CollectiveLog&) = default;
};

template <std::size_t D>
struct Shard {
  std::vector<VertexId> global_ids;
  std::vector<Point<D>> points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return global_ids.size(); }
};

// Runs fn(rank) for every rank, on up to hardware_concurrency threads.
// Each invocation must touch only state owned by its rank.
template <typename Fn>
void for_each_rank(std::size_t ranks, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(ranks, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t r = 0; r < ranks; ++r) fn(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r = next++; r < ranks; r = next++) {
          try {
            fn(r);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

template <std::size_t D>
class RankWorld {
 public:
  RankWorld() = default;

  // Contiguous near-equal split of the vertices in id order.
  static RankWorld distribute(const GeometricGraph<D>& graph, std::size_t ranks) {
    if (ranks == 0) throw InputError("rank count must be at least 1");
    RankWorld world;
    world.shards_.resize(ranks);
    const std::size_t n = graph.num_vertices();
    for (std::size_t r = 0; r < ranks; ++r) {
      const auto [begin, end] = shard_range(n, ranks, r);
      auto& shard = world.shards_[r];
      for (std::size_t v = begin; v < end; ++v) {
        shard.global_ids.push_back(static_cast<VertexId>(v));
        shard.points.push_back(graph.coords()[v]);
        shard.weights.push_back(graph.vertex_weights()[v]);
      }
    }
    return world;
  }

  static RankWorld from_shards(std::vector<Shard<D>> shards, CollectiveLog log = {}) {
    if (shards.empty()) throw InputError("rank count must be at least 1");
    RankWorld world;
    world.shards_ = std::move(shards);
    world.log_ = log;
    world.check_shards();
    return world;
  }

  // [begin, end) of the sorted positions owned by `rank`: sizes are
  // ceil(n/p) for the first n mod p ranks and floor(n/p) after.
  static std::pair<std::size_t, std::size_t> shard_range(std::size_t n, std::size_t ranks,
                                                         std::size_t rank) noexcept {
    const std::size_t base = n / ranks;
    const std::size_t extra = n % ranks;
    const std::size_t begin = rank * base + std::min(rank, extra);
    return {begin, begin + base + (rank < extra ? 1 : 0)};
  }

  std::size_t ranks() const noexcept { return shards_.size(); }

  std::size_t total_points() const noexcept {
    std::size_t n = 0;
    for (const auto& s : shards_) n += s.size();
    return n;
  }

  const Shard<D>& shard(std::size_t rank) const { return shards_.at(rank); }
  const std::vector<Shard<D>>& shards() const noexcept { return shards_; }

  CollectiveLog& log() noexcept { return log_; }
  const CollectiveLog& log() const noexcept { return log_; }

  template <typename Fn>
  void run(Fn&& fn) const {
    for_each_rank(ranks(), std::forward<Fn>(fn));
  }

 private:
  void check_shards() const {
    std::vector<char> seen;
    for (const auto& s : shards_) {
      if (s.points.size() != s.size() || s.weights.size() != s.size()) {
        throw InputError("shard arrays differ in length");
      }
      for (VertexId id : s.global_ids) {
        if (id >= seen.size()) seen.resize(id + 1, 0);
        if (seen[id]) throw InputError("vertex " + std::to_string(id) + " owned by two ranks");
        seen[id] = 1;
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      throw InputError("shards do not cover a contiguous id range");
    }
  }

  std::vector<Shard<D>> shards_;
  CollectiveLog log_;
};

namespace detail {

template <typename T>
void check_contributions(std::size_t ranks, std::span<const std::vector<T>> contributions) {
  if (contributions.size() != ranks) {
    throw InputError("collective: expected one contribution per rank");
  }
  for (const auto& c : contributions) {
    if (c.size() != contributions.front().size()) {
      throw InputError("collective: contribution lengths differ across ranks");
    }
  }
}

}  // namespace detail

// Element-wise sum, accumulated rank 0 first through rank p-1.
template <std::size_t D>
std::vector<double> allreduce_sum(RankWorld<D>& world,
                                  std::span<const std::vector<double>> contributions) {
  detail::check_contributions(world.ranks(), contributions);
  std::vector<double> total(contributions.front().size(), 0.0);
  for (const auto& c : contributions) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += c[i];
  }
  world.log().sum_reduce.record(total.size());
  return total;
}

// Exact element-wise sum: the result is independent of how terms are split
// among ranks, not just of the merge order.
template <std::size_t D>
std::vector<double> allreduce_sum(RankWorld<D>& world,
                                  std::span<const std::vector<ExactSum>> contributions) {
  detail::check_contributions(world.ranks(), contributions);
  std::vector<ExactSum> total(contributions.front().size());
  for (const auto& c : contributions) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += c[i];
  }
  world.log().sum_reduce.record(total.size());
  std::vector<double> result(total.size());
  for (std::size_t i = 0; i < total.size(); ++i) result[i] = total[i].value();
  return result;
}

template <std::size_t D>
std::vector<double> allreduce_max(RankWorld<D>& world,
                                  std::span<const std::vector<double>> contributions) {
  detail::check_contributions(world.ranks(), contributions);
  std::vector<double> result(contributions.front());
  for (const auto& c : contributions) {
    for (std::size_t i = 0; i < result.size(); ++i) result[i] = std::max(result[i], c[i]);
  }
  world.log().max_reduce.record(result.size());
  return result;
}

// Global bounding box of all shards (one max-reduce over 2D values).
template <std::size_t D>
BoundingBox<D> global_bounding_box(RankWorld<D>& world) {
  std::vector<std::vector<double>> local(world.ranks());
  world.run([&](std::size_t r) {
    const auto box = bounding_box<D>(world.shard(r).points);
    auto& row = local[r];
    row.resize(2 * D);
    for (std::size_t i = 0; i < D; ++i) {
      row[i] = -box.min[i];
      row[D + i] = box.max[i];
    }
  });
  const auto merged = allreduce_max(world, std::span<const std::vector<double>>(local));
  BoundingBox<D> box;
  for (std::size_t i = 0; i < D; ++i) {
    box.min[i] = -merged[i];
    box.max[i] = merged[D + i];
  }
  return box;
}

// Sorts all points globally by (key, global id) and splits the sorted
// sequence into p contiguous shards of near-equal size. Simulated as
// gather-sort-scatter; the global order depends only on the input multiset.
template <std::size_t D>
RankWorld<D> global_sort_redistribute(const RankWorld<D>& world,
                                      std::span<const std::vector<std::uint64_t>> keys) {
  if (keys.size() != world.ranks()) throw InputError("sort: expected keys for every rank");
  struct Item {
    std::uint64_t key;
    VertexId id;
    std::size_t rank;
    std::size_t local;
  };
  std::vector<Item> items;
  items.reserve(world.total_points());
  for (std::size_t r = 0; r < world.ranks(); ++r) {
    const auto& shard = world.shard(r);
    if (keys[r].size() != shard.size()) throw InputError("sort: every owned point needs a key");
    for (std::size_t i = 0; i < shard.size(); ++i) {
      items.push_back({keys[r][i], shard.global_ids[i], r, i});
    }
  }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.key != b.key ? a.key < b.key : a.id < b.id;
  });

  const std::size_t n = items.size();
  std::vector<Shard<D>> shards(world.ranks());
  for (std::size_t r = 0; r < shards.size(); ++r) {
    const auto [begin, end] = RankWorld<D>::shard_range(n, shards.size(), r);
    auto& out = shards[r];
    out.global_ids.reserve(end - begin);
    for (std::size_t pos = begin; pos < end; ++pos) {
      const auto& item = items[pos];
      const auto& src = world.shard(item.rank);
      out.global_ids.push_back(item.id);
      out.points.push_back(src.points[item.local]);
      out.weights.push_back(src.weights[item.local]);
    }
  }
  CollectiveLog log = world.log();
  log.sort_redistribute.record(n);
  RankWorld<D> sorted = RankWorld<D>::from_shards(std::move(shards), log);
  return sorted;
}

// Weighted means from per-rank partial sums. sums[r] holds k*D entries
// (cluster-major), weights[r] holds k entries. A cluster with zero total
// weight yields std::nullopt so the caller can apply its empty-cluster rule.
template <std::size_t D>
std::vector<std::optional<Point<D>>> weighted_mean_reduce(
    RankWorld<D>& world, std::span<const std::vector<ExactSum>> sums,
    std::span<const std::vector<ExactSum>> weights) {
  const auto total_sums = allreduce_sum(world, sums);
  const auto total_weights = allreduce_sum(world, weights);
  const std::size_t k = total_weights.size();
  if (total_sums.size() != k * D) throw InputError("weighted_mean_reduce: expected k*d sums");
  std::vector<std::optional<Point<D>>> centers(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (!(total_weights[c] > 0.0)) continue;
    Point<D> p{};
    for (std::size_t i = 0; i < D; ++i) p[i] = total_sums[c * D + i] / total_weights[c];
    centers[c] = p;
  }
  return centers;
}

}  // namespace geopart
