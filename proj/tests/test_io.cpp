#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "geopart/generators.hpp"
#include "geopart/io.hpp"

using namespace geopart;

namespace {

GeometricGraph<2> load(const std::string& graph, const std::string& coords) {
  std::istringstream g(graph);
  std::istringstream c(coords);
  return load_metis_graph<2>(g, c);
}

std::size_t error_line(const std::string& graph) {
  std::istringstream g(graph);
  try {
    detail::parse_metis(g, "t");
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Metis, PathGraph) {
  const auto g = load("3 2\n2\n1 3\n2\n", "0 0\n1 0\n2 0\n");
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.degree(1), 2u);
  EXPECT_EQ(g.neighbors(0)[0], 1u);
  EXPECT_EQ(g.coords()[2], (Point<2>{2, 0}));
}

TEST(Metis, WeightedFormat) {
  const auto g = load("2 1 011\n7 2 5\n9 1 5\n", "0 0\n1 1\n");
  EXPECT_EQ(g.vertex_weights(), (std::vector<double>{7, 9}));
  ASSERT_TRUE(g.has_edge_weights());
  EXPECT_EQ(g.edge_weight(0, 0), 5.0);
  EXPECT_EQ(g.num_edges(), 1u);
}

TEST(Metis, CommentsAndBlankAdjacency) {
  const auto g = load("% comment\n3 1\n2\n1\n\n", "0 0\n1 0\n5 5\n");
  EXPECT_EQ(g.degree(2), 0u);
}

TEST(Metis, ErrorsNameLines) {
  EXPECT_EQ(error_line("2 1\n2\n\n"), 2u);        // missing reverse edge
  EXPECT_EQ(error_line("2 1\n3\n1\n"), 2u);       // id out of range
  EXPECT_EQ(error_line("2 1\n2\n1 x\n"), 3u);     // non-numeric token
  EXPECT_EQ(error_line("2 1\n1\n\n"), 2u);        // self loop
  EXPECT_EQ(error_line("2 1 001\n2 4\n1 5\n"), 2u);  // asymmetric weights
  EXPECT_NE(error_line("3 1\n2\n1\n"), 0u);       // too few lines
  EXPECT_NE(error_line("2 1\n2\n1\n\n1\n"), 0u);  // extra lines
  EXPECT_NE(error_line("2 2\n2\n1\n"), 0u);       // edge count mismatch
}

TEST(Metis, ErrorMessageNamesSourceAndLine) {
  std::istringstream g("2 1\n2\n\n");
  try {
    detail::parse_metis(g, "mesh.graph");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.source(), "mesh.graph");
    EXPECT_NE(std::string(e.what()).find("mesh.graph:2:"), std::string::npos);
  }
}

TEST(Metis, CoordinateCountMismatch) {
  EXPECT_THROW(load("2 1\n2\n1\n", "0 0\n"), ParseError);
}

TEST(Metis, RoundTrip) {
  const auto g = random_geometric_graph<2>(500, 8, 3);
  std::ostringstream graph_out;
  std::ostringstream coord_out;
  write_metis_graph(g, graph_out);
  write_coordinates(std::span(g.coords()), coord_out);
  const auto back = load(graph_out.str(), coord_out.str());
  EXPECT_EQ(back.offsets(), g.offsets());
  EXPECT_EQ(back.adjacency(), g.adjacency());
  EXPECT_EQ(back.coords(), g.coords());
}

TEST(Metis, WeightedRoundTrip) {
  const auto g = load("3 2 011\n2 2 4\n1 1 4 3 7\n5 2 7\n", "0 0\n1 0\n2 0\n");
  std::ostringstream out;
  write_metis_graph(g, out);
  EXPECT_EQ(out.str().substr(0, 8), "3 2 011\n");
  std::istringstream again(out.str());
  const auto back = load_metis_topology(again, "again");
  EXPECT_EQ(back.vertex_weights(), g.vertex_weights());
  EXPECT_EQ(back.edge_weights(), g.edge_weights());
}

TEST(Coordinates, DimensionDetection) {
  std::istringstream two("1 2\n3 4\n");
  EXPECT_EQ(detect_coordinate_dimension(two), 2u);
  std::istringstream three("\n1 2 3\n");
  EXPECT_EQ(detect_coordinate_dimension(three), 3u);
  std::istringstream ragged("1 2 3\n4 5\n");
  EXPECT_THROW(read_coordinates<3>(ragged), ParseError);
}

TEST(Partition, Write) {
  std::ostringstream out;
  write_partition(Partition{{0, 1, 0}, 2}, out);
  EXPECT_EQ(out.str(), "0\n1\n0\n");
  std::ostringstream empty;
  write_partition(Partition{{}, 1}, empty);
  EXPECT_EQ(empty.str(), "");
}

TEST(Partition, Read) {
  std::istringstream in("0\n2\n1\n");
  const auto part = read_partition(in);
  EXPECT_EQ(part.k, 3);
  EXPECT_EQ(part.assignment, (std::vector<BlockId>{0, 2, 1}));
  std::istringstream bad("0\n-1\n");
  EXPECT_THROW(read_partition(bad), ParseError);
}
