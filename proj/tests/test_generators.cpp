#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "geopart/generators.hpp"
#include "geopart/io.hpp"
#include "oracles.hpp"

using namespace geopart;

TEST(Rgg, TwoPointOverride) {
  const auto g = random_geometric_graph_from_points<2>({{0, 0}, {1, 1}}, std::sqrt(2.0));
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_THROW(random_geometric_graph<2>(1, 12, 0), InputError);
}

template <std::size_t D>
void check_against_all_pairs(std::size_t n, double degree, std::uint64_t seed) {
  const auto g = random_geometric_graph<D>(n, degree, seed);
  const auto expected = oracle::all_pairs_within<D>(g.coords(), rgg_radius<D>(n, degree));
  std::set<std::pair<std::uint32_t, std::uint32_t>> actual;
  for (VertexId v = 0; v < n; ++v) {
    for (const auto u : g.neighbors(v)) {
      if (u > v) actual.insert({v, u});
    }
  }
  EXPECT_EQ(actual, expected);
}

TEST(Rgg, MatchesAllPairsSearch) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    check_against_all_pairs<2>(1500, 10, seed);
    check_against_all_pairs<3>(1200, 10, seed);
  }
  check_against_all_pairs<2>(2000, 40, 9);
}

TEST(Rgg, ClusteredPointsMatchAllPairs) {
  std::mt19937_64 rng(5);
  std::vector<Point<2>> pts(800);
  for (auto& p : pts) p = {unit_uniform(rng) * 0.01, unit_uniform(rng) * 3.0};
  const double r = 0.05;
  const auto g = random_geometric_graph_from_points<2>(pts, r);
  EXPECT_EQ(g.num_edges(), oracle::all_pairs_within<2>(pts, r).size());
}

TEST(Rgg, MeanDegreeNearTarget) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = random_geometric_graph<2>(10000, 12, seed);
    const double mean = 2.0 * static_cast<double>(g.num_edges()) / 10000.0;
    EXPECT_GE(mean, 9.0);
    EXPECT_LE(mean, 15.0);
  }
}

TEST(Rgg, Deterministic) {
  std::ostringstream a;
  std::ostringstream b;
  write_metis_graph(random_geometric_graph<3>(3000, 12, 77), a);
  write_metis_graph(random_geometric_graph<3>(3000, 12, 77), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Grid, Counts) {
  EXPECT_EQ(grid_mesh<2>(2).num_vertices(), 4u);
  EXPECT_EQ(grid_mesh<2>(2).num_edges(), 4u);
  EXPECT_EQ(grid_mesh<2>(3).num_vertices(), 9u);
  EXPECT_EQ(grid_mesh<2>(3).num_edges(), 12u);
  EXPECT_EQ(grid_mesh<3>(2).num_vertices(), 8u);
  EXPECT_EQ(grid_mesh<3>(2).num_edges(), 12u);
  EXPECT_EQ(grid_mesh<3>(5).num_edges(), 3u * 5 * 5 * 4);
  EXPECT_THROW(grid_mesh<2>(1), InputError);
}

TEST(Grid, NeighborsAreUnitDistance) {
  const auto g = grid_mesh<3>(4);
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    for (const auto u : g.neighbors(v)) EXPECT_EQ(squared_distance(g.coords()[v], g.coords()[u]), 1.0);
  }
}
