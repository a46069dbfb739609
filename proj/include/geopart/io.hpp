#pragma once

// Text formats: METIS graphs, whitespace coordinate files and partition
// files (one decimal block id per line).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "geopart/errors.hpp"
#include "geopart/graph.hpp"

namespace geopart {

namespace detail {

inline std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

inline bool is_blank(std::string_view line) { return split_tokens(line).empty(); }

template <typename T>
T parse_number(std::string_view token, const std::string& source, std::size_t line) {
  T value{};
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(source, line, "expected a number, found '" + std::string(token) + "'");
  }
  return value;
}

template <typename T>
void append_number(std::string& out, T value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  out.append(buffer, ptr);
}

}  // namespace detail

// Reads n lines of D reals. Blank lines are skipped; a line with the wrong
// number of values is a parse error.
template <std::size_t D>
std::vector<Point<D>> read_coordinates(std::istream& in, const std::string& source = "coords") {
  std::vector<Point<D>> coords;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = detail::split_tokens(line);
    if (tokens.empty()) continue;
    if (tokens.size() != D) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(D) + " coordinates, found " +
                           std::to_string(tokens.size()));
    }
    Point<D> p{};
    for (std::size_t i = 0; i < D; ++i) {
      p[i] = detail::parse_number<double>(tokens[i], source, line_no);
      if (!std::isfinite(p[i])) throw ParseError(source, line_no, "non-finite coordinate");
    }
    coords.push_back(p);
  }
  return coords;
}

// Number of values on the first non-blank line, or 0 for an empty stream.
inline std::size_t detect_coordinate_dimension(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto tokens = detail::split_tokens(line);
    if (!tokens.empty()) return tokens.size();
  }
  return 0;
}

// METIS adjacency text plus a coordinate file. The header is
// "n m [fmt [ncon]]": fmt digit 1 (ones) enables edge weights, digit 2
// vertex weights, digit 3 vertex sizes (read and ignored). Ids are 1-based
// in the file and 0-based in the result. Lines starting with '%' are comments.
namespace detail {

struct MetisAdjacency {
  std::vector<std::size_t> offsets;
  std::vector<VertexId> neighbors;
  std::vector<double> edge_weights;
  std::vector<double> vertex_weights;
};

inline MetisAdjacency parse_metis(std::istream& graph_text, const std::string& graph_source) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(graph_text, line)) {
      ++line_no;
      if (!line.empty() && line[0] == '%') continue;
      return true;
    }
    return false;
  };

  do {
    if (!next_line()) throw ParseError(graph_source, line_no, "missing header line");
  } while (detail::is_blank(line));

  const auto header = detail::split_tokens(line);
  if (header.size() < 2 || header.size() > 4) {
    throw ParseError(graph_source, line_no, "header must be 'n m [fmt [ncon]]'");
  }
  const auto n = detail::parse_number<std::uint64_t>(header[0], graph_source, line_no);
  const auto m = detail::parse_number<std::uint64_t>(header[1], graph_source, line_no);
  if (n > std::uint64_t{UINT32_MAX}) throw ParseError(graph_source, line_no, "too many vertices");
  bool has_sizes = false;
  bool has_vertex_weights = false;
  bool has_edge_weights = false;
  std::size_t ncon = 1;
  if (header.size() >= 3) {
    const std::string_view fmt = header[2];
    if (fmt.size() > 3 || fmt.find_first_not_of("01") != std::string_view::npos) {
      throw ParseError(graph_source, line_no, "fmt must be up to three 0/1 digits");
    }
    const std::string padded = std::string(3 - fmt.size(), '0') + std::string(fmt);
    has_sizes = padded[0] == '1';
    has_vertex_weights = padded[1] == '1';
    has_edge_weights = padded[2] == '1';
  }
  if (header.size() == 4) {
    ncon = detail::parse_number<std::size_t>(header[3], graph_source, line_no);
    if (ncon != 1) throw ParseError(graph_source, line_no, "only ncon = 1 is supported");
  }
  const std::size_t header_line = line_no;

  std::vector<std::size_t> offsets{0};
  std::vector<VertexId> neighbors;
  std::vector<double> edge_weights;
  std::vector<double> vertex_weights(n, 1.0);
  std::vector<std::size_t> vertex_line(n, 0);
  offsets.reserve(n + 1);

  for (std::size_t v = 0; v < n; ++v) {
    if (!next_line()) {
      throw ParseError(graph_source, line_no,
                       "expected " + std::to_string(n) + " adjacency lines, found " +
                           std::to_string(v));
    }
    vertex_line[v] = line_no;
    const auto tokens = detail::split_tokens(line);
    std::size_t pos = 0;
    if (has_sizes) {
      if (pos >= tokens.size()) throw ParseError(graph_source, line_no, "missing vertex size");
      (void)detail::parse_number<double>(tokens[pos++], graph_source, line_no);
    }
    if (has_vertex_weights) {
      if (pos >= tokens.size()) throw ParseError(graph_source, line_no, "missing vertex weight");
      const double w = detail::parse_number<double>(tokens[pos++], graph_source, line_no);
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw ParseError(graph_source, line_no, "vertex weight must be positive");
      }
      vertex_weights[v] = w;
    }
    const std::size_t stride = has_edge_weights ? 2 : 1;
    if ((tokens.size() - pos) % stride != 0) {
      throw ParseError(graph_source, line_no, "neighbor without edge weight");
    }
    for (; pos < tokens.size(); pos += stride) {
      const auto id = detail::parse_number<std::uint64_t>(tokens[pos], graph_source, line_no);
      if (id < 1 || id > n) {
        throw ParseError(graph_source, line_no, "neighbor id " + std::to_string(id) +
                                                    " outside [1, " + std::to_string(n) + "]");
      }
      if (id - 1 == v) throw ParseError(graph_source, line_no, "self-loop");
      neighbors.push_back(static_cast<VertexId>(id - 1));
      if (has_edge_weights) {
        const double w = detail::parse_number<double>(tokens[pos + 1], graph_source, line_no);
        if (!(w > 0.0) || !std::isfinite(w)) {
          throw ParseError(graph_source, line_no, "edge weight must be positive");
        }
        edge_weights.push_back(w);
      }
    }
    offsets.push_back(neighbors.size());
  }
  while (next_line()) {
    if (!detail::is_blank(line)) {
      throw ParseError(graph_source, line_no,
                       "more adjacency lines than the " + std::to_string(n) + " in the header");
    }
  }

  // Symmetry with line context, before the graph re-validates.
  std::vector<std::vector<std::pair<VertexId, double>>> sorted(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t i = offsets[u]; i < offsets[u + 1]; ++i) {
      sorted[u].emplace_back(neighbors[i], has_edge_weights ? edge_weights[i] : 1.0);
    }
    std::sort(sorted[u].begin(), sorted[u].end());
    for (std::size_t i = 1; i < sorted[u].size(); ++i) {
      if (sorted[u][i].first == sorted[u][i - 1].first) {
        throw ParseError(graph_source, vertex_line[u],
                         "duplicate neighbor " + std::to_string(sorted[u][i].first + 1));
      }
    }
  }
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& [v, w] : sorted[u]) {
      const auto& back = sorted[v];
      const auto it = std::lower_bound(back.begin(), back.end(), std::make_pair(
          static_cast<VertexId>(u), -std::numeric_limits<double>::infinity()));
      if (it == back.end() || it->first != u) {
        throw ParseError(graph_source, vertex_line[u],
                         "edge " + std::to_string(u + 1) + "->" + std::to_string(v + 1) +
                             " has no reverse edge");
      }
      if (it->second != w) {
        throw ParseError(graph_source, vertex_line[u],
                         "edge " + std::to_string(u + 1) + "-" + std::to_string(v + 1) +
                             " has asymmetric weights");
      }
    }
  }
  if (neighbors.size() != 2 * m) {
    throw ParseError(graph_source, header_line,
                     "header declares " + std::to_string(m) + " edges, adjacency has " +
                         std::to_string(neighbors.size() / 2));
  }
  return {std::move(offsets), std::move(neighbors), std::move(edge_weights),
          std::move(vertex_weights)};
}

}  // namespace detail

template <std::size_t D>
GeometricGraph<D> load_metis_graph(std::istream& graph_text, std::istream& coord_text,
                                   const std::string& graph_source = "graph",
                                   const std::string& coord_source = "coords") {
  auto adjacency = detail::parse_metis(graph_text, graph_source);
  const std::size_t n = adjacency.vertex_weights.size();
  auto coords = read_coordinates<D>(coord_text, coord_source);
  if (coords.size() != n) {
    throw ParseError(coord_source, coords.size(),
                     "found " + std::to_string(coords.size()) + " coordinate lines for " +
                         std::to_string(n) + " vertices");
  }
  return GeometricGraph<D>(std::move(adjacency.offsets), std::move(adjacency.neighbors),
                           std::move(adjacency.edge_weights), std::move(coords),
                           std::move(adjacency.vertex_weights));
}

// Graph structure only; every coordinate is zero. For metric evaluation.
inline GeometricGraph<2> load_metis_topology(std::istream& graph_text,
                                             const std::string& graph_source = "graph") {
  auto adjacency = detail::parse_metis(graph_text, graph_source);
  std::vector<Point<2>> coords(adjacency.vertex_weights.size(), Point<2>{0.0, 0.0});
  return GeometricGraph<2>(std::move(adjacency.offsets), std::move(adjacency.neighbors),
                           std::move(adjacency.edge_weights), std::move(coords),
                           std::move(adjacency.vertex_weights));
}

// METIS output. Weights are written only when not all equal to 1; reals use
// the shortest round-trip representation.
template <std::size_t D>
void write_metis_graph(const GeometricGraph<D>& graph, std::ostream& out) {
  const bool vertex_weights = !graph.unit_vertex_weights();
  const bool edge_weights = graph.has_edge_weights() &&
                            std::any_of(graph.edge_weights().begin(), graph.edge_weights().end(),
                                        [](double w) { return w != 1.0; });
  std::string text;
  detail::append_number(text, graph.num_vertices());
  text += ' ';
  detail::append_number(text, graph.num_edges());
  if (vertex_weights || edge_weights) {
    text += ' ';
    text += vertex_weights ? "01" : "0";
    text += edge_weights ? '1' : '0';
  }
  text += '\n';
  for (std::size_t v = 0; v < graph.num_vertices(); ++v) {
    bool first = true;
    auto separate = [&] {
      if (!first) text += ' ';
      first = false;
    };
    if (vertex_weights) {
      separate();
      detail::append_number(text, graph.vertex_weights()[v]);
    }
    const auto nbrs = graph.neighbors(static_cast<VertexId>(v));
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      separate();
      detail::append_number(text, std::uint64_t{nbrs[i]} + 1);
      if (edge_weights) {
        text += ' ';
        detail::append_number(text, graph.edge_weight(static_cast<VertexId>(v), i));
      }
    }
    text += '\n';
  }
  out << text;
}

template <std::size_t D>
void write_coordinates(std::span<const Point<D>> coords, std::ostream& out) {
  std::string text;
  for (const auto& p : coords) {
    for (std::size_t i = 0; i < D; ++i) {
      if (i > 0) text += ' ';
      detail::append_number(text, p[i]);
    }
    text += '\n';
  }
  out << text;
}

inline void write_partition(const Partition& part, std::ostream& out) {
  std::string text;
  text.reserve(part.assignment.size() * 3);
  for (BlockId b : part.assignment) {
    detail::append_number(text, b);
    text += '\n';
  }
  out << text;
  if (!out) throw std::runtime_error("write_partition: output stream failure");
}

// One block id per non-blank line; k is one more than the largest id.
inline Partition read_partition(std::istream& in, const std::string& source = "partition") {
  Partition part;
  part.k = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = detail::split_tokens(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 1) throw ParseError(source, line_no, "expected one block id per line");
    const auto id = detail::parse_number<BlockId>(tokens[0], source, line_no);
    if (id < 0) throw ParseError(source, line_no, "negative block id");
    part.assignment.push_back(id);
    part.k = std::max(part.k, id + 1);
  }
  if (part.k == 0) part.k = 1;
  return part;
}

}  // namespace geopart
