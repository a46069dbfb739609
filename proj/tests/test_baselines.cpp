#include <gtest/gtest.h>

#include <set>

#include "geopart/baselines.hpp"
#include "geopart/generators.hpp"

using namespace geopart;

namespace {

GeometricGraph<2> line(std::size_t n) {
  std::vector<Point<2>> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = {static_cast<double>(i), 0.0};
  std::vector<WeightedEdge> edges;
  return GeometricGraph<2>::from_edges(n, edges, pts);
}

}  // namespace

TEST(Rcb, CollinearMedian) {
  EXPECT_EQ(rcb_partition<2>(line(4), 2).assignment, (std::vector<BlockId>{0, 0, 1, 1}));
  EXPECT_EQ(rcb_partition<2>(line(4), 1).assignment, (std::vector<BlockId>{0, 0, 0, 0}));
  EXPECT_THROW(rcb_partition<2>(line(4), 5), InputError);
}

TEST(Rcb, GridQuadrants) {
  const auto g = grid_mesh<2>(4);
  const auto part = rcb_partition<2>(g, 4);
  for (VertexId v = 0; v < 16; ++v) {
    const auto& c = g.coords()[v];
    const int qx = c[0] < 2 ? 0 : 1;
    const int qy = c[1] < 2 ? 0 : 1;
    EXPECT_EQ(part.assignment[v], qx * 2 + qy) << v;
  }
}

TEST(Rcb, BalancedWhenKDividesN) {
  for (std::size_t k : {2, 3, 5, 8, 16}) {
    const auto g = random_geometric_graph<3>(4000, 8, k);
    const auto part = rcb_partition<3>(g, k);
    EXPECT_EQ(imbalance(block_weights(g, part)), 0.0) << k;
  }
}

TEST(Rcb, MirrorSymmetricOnSymmetricInput) {
  std::vector<Point<2>> pts;
  for (int i = -5; i <= 5; ++i) {
    if (i != 0) pts.push_back({static_cast<double>(i), 0.3 * i * i});
  }
  std::vector<WeightedEdge> edges;
  const auto g = GeometricGraph<2>::from_edges(pts.size(), edges, pts);
  const auto part = rcb_partition<2>(g, 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_NE(part.assignment[i], part.assignment[pts.size() - 1 - i]);
  }
}

TEST(Sfc, Basics) {
  EXPECT_EQ(sfc_partition<2>(line(5), 1).block_sizes(), (std::vector<std::size_t>{5}));
  auto all = sfc_partition<2>(line(6), 6);
  EXPECT_EQ(std::set<BlockId>(all.assignment.begin(), all.assignment.end()).size(), 6u);
  EXPECT_THROW(sfc_partition<2>(line(3), 4), InputError);
}

TEST(Sfc, ExactSizesWhenKDividesN) {
  const auto g = random_geometric_graph<2>(6000, 8, 4);
  for (std::size_t k : {2, 3, 4, 12, 60}) {
    for (auto s : sfc_partition<2>(g, k).block_sizes()) EXPECT_EQ(s, 6000 / k);
  }
}

TEST(Sfc, BlocksAreContiguousAlongCurve) {
  const auto g = grid_mesh<2>(16);
  const auto part = sfc_partition<2>(g, 4, 4);
  const auto box = bounding_box<2>(g.coords());
  std::vector<std::pair<std::uint64_t, BlockId>> seq;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    seq.push_back({hilbert_key<2>(g.coords()[v], box, 4).value, part.assignment[v]});
  }
  std::sort(seq.begin(), seq.end());
  for (std::size_t i = 1; i < seq.size(); ++i) EXPECT_GE(seq[i].second, seq[i - 1].second);
}
