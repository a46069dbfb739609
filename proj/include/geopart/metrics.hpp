#pragma once

// Partition quality: edge cut, communication volume, imbalance and a BFS
// lower bound on each block's diameter, plus mean aggregation and report
// serialization.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "geopart/errors.hpp"
#include "geopart/graph.hpp"
#include "geopart/io.hpp"

namespace geopart {

namespace detail {

template <std::size_t D>
void check_cover(const GeometricGraph<D>& graph, const Partition& part) {
  if (part.size() != graph.num_vertices()) {
    throw InputError("partition has " + std::to_string(part.size()) + " entries for " +
                     std::to_string(graph.num_vertices()) + " vertices");
  }
  part.validate();
}

}  // namespace detail

// Total weight of edges whose endpoints lie in different blocks.
template <std::size_t D>
double edge_cut(const GeometricGraph<D>& graph, const Partition& part) {
  detail::check_cover(graph, part);
  double cut = 0.0;
  for (VertexId u = 0; u < graph.num_vertices(); ++u) {
    const auto nbrs = graph.neighbors(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (u < nbrs[i] && part.assignment[u] != part.assignment[nbrs[i]]) {
        cut += graph.edge_weight(u, i);
      }
    }
  }
  return cut;
}

struct CommVolumes {
  std::vector<std::uint64_t> per_block;
  std::uint64_t max = 0;
  std::uint64_t total = 0;
};

// comm(V_i): sum over v in V_i of the number of other blocks holding a
// neighbor of v.
template <std::size_t D>
CommVolumes comm_volumes(const GeometricGraph<D>& graph, const Partition& part) {
  detail::check_cover(graph, part);
  CommVolumes result;
  result.per_block.assign(static_cast<std::size_t>(part.k), 0);
  std::vector<std::size_t> seen(static_cast<std::size_t>(part.k), SIZE_MAX);
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    const BlockId own = part.assignment[v];
    std::uint64_t foreign = 0;
    for (const VertexId u : graph.neighbors(v)) {
      const auto b = static_cast<std::size_t>(part.assignment[u]);
      if (part.assignment[u] != own && seen[b] != v) {
        seen[b] = v;
        ++foreign;
      }
    }
    result.per_block[static_cast<std::size_t>(own)] += foreign;
  }
  for (const auto c : result.per_block) {
    result.max = std::max(result.max, c);
    result.total += c;
  }
  return result;
}

// Hop-count diameter bound of one block; nullopt marks a disconnected block
// (infinite diameter).
using Diameter = std::optional<std::uint64_t>;

namespace detail {

// Induced subgraph of one block with local ids.
struct BlockGraph {
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> adjacency;

  std::size_t size() const noexcept { return offsets.size() - 1; }
};

template <std::size_t D>
BlockGraph induced_block(const GeometricGraph<D>& graph, const Partition& part, BlockId block) {
  std::vector<std::uint32_t> local(graph.num_vertices(), UINT32_MAX);
  std::vector<VertexId> members;
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    if (part.assignment[v] == block) {
      local[v] = static_cast<std::uint32_t>(members.size());
      members.push_back(v);
    }
  }
  BlockGraph sub;
  for (const VertexId v : members) {
    for (const VertexId u : graph.neighbors(v)) {
      if (local[u] != UINT32_MAX) sub.adjacency.push_back(local[u]);
    }
    sub.offsets.push_back(sub.adjacency.size());
  }
  return sub;
}

struct Bfs {
  std::vector<std::uint32_t> dist;
  std::vector<std::uint32_t> parent;
  std::uint32_t farthest = 0;
  std::uint32_t eccentricity = 0;
  std::size_t reached = 0;
};

inline Bfs bfs(const BlockGraph& g, std::uint32_t source) {
  Bfs out;
  out.dist.assign(g.size(), UINT32_MAX);
  out.parent.assign(g.size(), UINT32_MAX);
  std::vector<std::uint32_t> queue{source};
  queue.reserve(g.size());
  out.dist[source] = 0;
  out.farthest = source;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t v = queue[head];
    if (out.dist[v] > out.eccentricity) {
      out.eccentricity = out.dist[v];
      out.farthest = v;
    }
    for (std::size_t i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
      const std::uint32_t u = g.adjacency[i];
      if (out.dist[u] == UINT32_MAX) {
        out.dist[u] = out.dist[v] + 1;
        out.parent[u] = v;
        queue.push_back(u);
      }
    }
  }
  out.reached = queue.size();
  return out;
}

}  // namespace detail

// Lower bound on the diameter of the subgraph induced by `block`: a double
// sweep, then BFS from the midpoint u of the sweep path and up to
// `fringe_rounds` iFUB rounds taking eccentricities of the vertices at the
// deepest remaining BFS level of u. Stops early once the bound is provably
// exact (lb >= 2 * level, the upper bound left by the unprocessed levels).
// Never exceeds the true diameter.
template <std::size_t D>
Diameter block_diameter_lb(const GeometricGraph<D>& graph, const Partition& part, BlockId block,
                           unsigned fringe_rounds = 3) {
  detail::check_cover(graph, part);
  const auto sub = detail::induced_block(graph, part, block);
  if (sub.size() == 0) throw InputError("block " + std::to_string(block) + " is empty");

  const auto first = detail::bfs(sub, 0);
  if (first.reached != sub.size()) return std::nullopt;
  const auto sweep = detail::bfs(sub, first.farthest);
  std::uint64_t lb = sweep.eccentricity;

  std::uint32_t mid = sweep.farthest;
  for (std::uint32_t step = 0; step < sweep.eccentricity / 2; ++step) mid = sweep.parent[mid];
  const auto center = detail::bfs(sub, mid);
  lb = std::max<std::uint64_t>(lb, center.eccentricity);

  std::vector<std::vector<std::uint32_t>> levels(center.eccentricity + 1);
  for (std::uint32_t v = 0; v < sub.size(); ++v) levels[center.dist[v]].push_back(v);
  std::uint32_t level = center.eccentricity;
  for (unsigned round = 0; round < fringe_rounds && level > 0; ++round, --level) {
    if (lb >= 2 * static_cast<std::uint64_t>(level)) break;
    for (const std::uint32_t v : levels[level]) {
      lb = std::max<std::uint64_t>(lb, detail::bfs(sub, v).eccentricity);
    }
  }
  return lb;
}

// Geometric mean of positive values (cut and volume ratios).
inline double geometric_mean(std::span<const double> values) {
  if (values.empty()) throw InputError("geometric_mean: no values");
  double log_sum = 0.0;
  for (double v : values) {
    if (v < 0.0) throw InputError("geometric_mean: negative value");
    if (v == 0.0) return 0.0;
    log_sum += std::log(v);
  }
  return std::exp(log_sum / static_cast<double>(values.size()));
}

// Harmonic mean; infinite entries contribute a zero reciprocal, so a few
// disconnected blocks do not make the mean infinite.
inline double harmonic_mean(std::span<const double> values) {
  if (values.empty()) throw InputError("harmonic_mean: no values");
  double reciprocal_sum = 0.0;
  for (double v : values) {
    if (v < 0.0) throw InputError("harmonic_mean: negative value");
    if (v == 0.0) return 0.0;
    reciprocal_sum += 1.0 / v;
  }
  return static_cast<double>(values.size()) / reciprocal_sum;
}

inline double harmonic_mean(std::span<const Diameter> diameters) {
  std::vector<double> values;
  values.reserve(diameters.size());
  for (const auto& d : diameters) {
    values.push_back(d ? static_cast<double>(*d) : std::numeric_limits<double>::infinity());
  }
  return harmonic_mean(std::span<const double>(values));
}

struct MetricsReport {
  BlockId k = 1;
  double edge_cut = 0.0;
  std::uint64_t max_comm = 0;
  std::uint64_t total_comm = 0;
  double imbalance = 0.0;
  std::vector<double> block_weights;
  std::vector<std::uint64_t> block_comm;
  std::vector<Diameter> block_diameter_lb;  // nullopt: disconnected (or empty) block
  double harmonic_mean_diameter = 0.0;      // infinity when every block is disconnected

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Full metric suite. Empty blocks get no diameter entry in the mean.
template <std::size_t D>
MetricsReport evaluate(const GeometricGraph<D>& graph, const Partition& part) {
  MetricsReport report;
  report.k = part.k;
  report.edge_cut = edge_cut(graph, part);
  auto comm = comm_volumes(graph, part);
  report.max_comm = comm.max;
  report.total_comm = comm.total;
  report.block_comm = std::move(comm.per_block);
  report.block_weights = block_weights(graph, part);
  report.imbalance = imbalance(report.block_weights);
  std::vector<Diameter> nonempty;
  for (BlockId b = 0; b < part.k; ++b) {
    Diameter d = std::nullopt;
    if (report.block_weights[static_cast<std::size_t>(b)] > 0.0) {
      d = block_diameter_lb(graph, part, b);
      nonempty.push_back(d);
    }
    report.block_diameter_lb.push_back(d);
  }
  report.harmonic_mean_diameter =
      nonempty.empty() ? 0.0 : harmonic_mean(std::span<const Diameter>(nonempty));
  return report;
}

// Human-readable "key: value" lines.
inline void write_summary(const MetricsReport& report, std::ostream& out) {
  std::string text;
  auto field = [&](const char* key, auto value) {
    text += key;
    text += ": ";
    detail::append_number(text, value);
    text += '\n';
  };
  field("k", report.k);
  field("edge_cut", report.edge_cut);
  field("max_comm", report.max_comm);
  field("total_comm", report.total_comm);
  field("imbalance", report.imbalance);
  field("harmonic_mean_diameter", report.harmonic_mean_diameter);
  out << text;
}

// Machine-readable records: one 'S' summary row, then one 'B' row per block.
//   S,k,edge_cut,max_comm,total_comm,imbalance,harmonic_mean_diameter
//   B,block,weight,comm,diameter_lb   (diameter_lb "inf" when disconnected)
// Reals use the shortest round-trip representation.
inline void write_records(const MetricsReport& report, std::ostream& out) {
  std::string text = "# S,k,edge_cut,max_comm,total_comm,imbalance,harmonic_mean_diameter\n";
  text += "# B,block,weight,comm,diameter_lb\n";
  auto add = [&](auto value) {
    text += ',';
    detail::append_number(text, value);
  };
  text += 'S';
  add(report.k);
  add(report.edge_cut);
  add(report.max_comm);
  add(report.total_comm);
  add(report.imbalance);
  add(report.harmonic_mean_diameter);
  text += '\n';
  for (std::size_t b = 0; b < report.block_weights.size(); ++b) {
    text += 'B';
    add(b);
    add(report.block_weights[b]);
    add(report.block_comm[b]);
    if (report.block_diameter_lb[b]) {
      add(*report.block_diameter_lb[b]);
    } else {
      text += ",inf";
    }
    text += '\n';
  }
  out << text;
}

inline MetricsReport read_records(std::istream& in, const std::string& source = "report") {
  MetricsReport report;
  bool have_summary = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields[0] == "S" && fields.size() == 7) {
      report.k = detail::parse_number<BlockId>(fields[1], source, line_no);
      report.edge_cut = detail::parse_number<double>(fields[2], source, line_no);
      report.max_comm = detail::parse_number<std::uint64_t>(fields[3], source, line_no);
      report.total_comm = detail::parse_number<std::uint64_t>(fields[4], source, line_no);
      report.imbalance = detail::parse_number<double>(fields[5], source, line_no);
      report.harmonic_mean_diameter = detail::parse_number<double>(fields[6], source, line_no);
      have_summary = true;
    } else if (fields[0] == "B" && fields.size() == 5) {
      const auto block = detail::parse_number<std::size_t>(fields[1], source, line_no);
      if (block != report.block_weights.size()) {
        throw ParseError(source, line_no, "block rows must be in order");
      }
      report.block_weights.push_back(detail::parse_number<double>(fields[2], source, line_no));
      report.block_comm.push_back(detail::parse_number<std::uint64_t>(fields[3], source, line_no));
      if (fields[4] == "inf") {
        report.block_diameter_lb.emplace_back(std::nullopt);
      } else {
        report.block_diameter_lb.emplace_back(
            detail::parse_number<std::uint64_t>(fields[4], source, line_no));
      }
    } else {
      throw ParseError(source, line_no, "unrecognized record");
    }
  }
  if (!have_summary) throw ParseError(source, line_no, "missing summary record");
  if (report.block_weights.size() != static_cast<std::size_t>(report.k)) {
    throw ParseError(source, line_no, "block row count differs from k");
  }
  return report;
}

}  // namespace geopart
