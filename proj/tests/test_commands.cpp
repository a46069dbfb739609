#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "geopart/commands.hpp"

using namespace geopart;
namespace fs = std::filesystem;

namespace {

class Commands : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("geopart_cmd_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  std::string read(const std::string& name) const { return detail::read_file(path(name)); }

  void generate_grid(std::size_t side, const std::string& stem) const {
    RunConfig config;
    config.kind = "grid";
    config.side = side;
    config.graph_paths = {path(stem + ".graph")};
    config.coord_paths = {path(stem + ".xyz")};
    std::ostringstream out;
    ASSERT_EQ(cmd_generate(config, out), kExitOk);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Commands, GenerateGridHeader) {
  generate_grid(3, "g");
  EXPECT_EQ(read("g.graph").substr(0, 5), "9 12\n");
}

TEST_F(Commands, GenerateDeterministic) {
  RunConfig config;
  config.n = 2000;
  config.seed = 4;
  config.graph_paths = {path("a.graph")};
  config.coord_paths = {path("a.xyz")};
  std::ostringstream out;
  cmd_generate(config, out);
  config.graph_paths = {path("b.graph")};
  config.coord_paths = {path("b.xyz")};
  cmd_generate(config, out);
  EXPECT_EQ(read("a.graph"), read("b.graph"));
  EXPECT_EQ(read("a.xyz"), read("b.xyz"));
}

TEST_F(Commands, GeneratedRggPartitions) {
  RunConfig config;
  config.n = 10000;
  config.seed = 1;
  config.graph_paths = {path("r.graph")};
  config.coord_paths = {path("r.xyz")};
  std::ostringstream out;
  cmd_generate(config, out);
  config.k = 8;
  config.out_path = path("r.part");
  EXPECT_EQ(cmd_partition(config, out), kExitOk);
  std::istringstream part(read("r.part"));
  EXPECT_EQ(read_partition(part).size(), 10000u);
}

TEST_F(Commands, PartitionGridBalanced) {
  generate_grid(16, "g");
  RunConfig config;
  config.graph_paths = {path("g.graph")};
  config.coord_paths = {path("g.xyz")};
  config.k = 4;
  config.out_path = path("g.part");
  std::ostringstream out;
  EXPECT_EQ(cmd_partition(config, out), kExitOk);
  EXPECT_NE(out.str().find("balanced=yes"), std::string::npos);
  std::istringstream part_in(read("g.part"));
  const auto part = read_partition(part_in);
  const auto g = grid_mesh<2>(16);
  EXPECT_LE(imbalance(block_weights(g, part)), 0.03);

  config.algorithm = "rcb";
  config.out_path = path("g_rcb.part");
  EXPECT_EQ(cmd_partition(config, out), kExitOk);
  std::istringstream rcb_in(read("g_rcb.part"));
  EXPECT_EQ(read_partition(rcb_in).size(), 256u);
}

TEST_F(Commands, PartitionSingleBlockHasZeroCut) {
  generate_grid(5, "g");
  RunConfig config;
  config.graph_paths = {path("g.graph")};
  config.coord_paths = {path("g.xyz")};
  config.k = 1;
  std::ostringstream out;
  EXPECT_EQ(cmd_partition(config, out), kExitOk);
  EXPECT_NE(out.str().find(" cut=0 "), std::string::npos);
}

TEST_F(Commands, EvaluatePathFixture) {
  write("p.graph", "4 3\n2\n1 3\n2 4\n3\n");
  write("p.part", "0\n0\n1\n1\n");
  RunConfig config;
  config.graph_paths = {path("p.graph")};
  config.partition_path = path("p.part");
  config.report_path = path("p.report");
  std::ostringstream out;
  EXPECT_EQ(cmd_evaluate(config, out), kExitOk);
  EXPECT_NE(out.str().find("edge_cut: 1\n"), std::string::npos);
  EXPECT_NE(out.str().find("max_comm: 1\n"), std::string::npos);
  EXPECT_NE(out.str().find("total_comm: 2\n"), std::string::npos);
  std::istringstream report(read("p.report"));
  EXPECT_EQ(read_records(report).total_comm, 2u);

  write("one.part", "0\n0\n0\n0\n");
  config.partition_path = path("one.part");
  std::ostringstream single;
  cmd_evaluate(config, single);
  EXPECT_NE(single.str().find("edge_cut: 0\n"), std::string::npos);
  EXPECT_NE(single.str().find("total_comm: 0\n"), std::string::npos);
}

TEST_F(Commands, EvaluateLengthMismatchNamesBothFiles) {
  write("p.graph", "4 3\n2\n1 3\n2 4\n3\n");
  write("short.part", "0\n1\n");
  RunConfig config;
  config.graph_paths = {path("p.graph")};
  config.partition_path = path("short.part");
  std::ostringstream out;
  try {
    cmd_evaluate(config, out);
    FAIL();
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("short.part"), std::string::npos);
    EXPECT_NE(msg.find("p.graph"), std::string::npos);
  }
}

TEST_F(Commands, CompareSelfIsOne) {
  generate_grid(12, "g");
  RunConfig config;
  config.graph_paths = {path("g.graph")};
  config.coord_paths = {path("g.xyz")};
  config.algorithms = {"geographer", "geographer"};
  config.k = 4;
  const auto table = compare(config);
  for (const auto& row : table.ratios) {
    for (const auto& r : row) {
      ASSERT_TRUE(r);
      EXPECT_EQ(*r, 1.0);
    }
  }
}

TEST_F(Commands, CompareHandMadePartitions) {
  write("p.graph", "4 3\n2\n1 3\n2 4\n3\n");
  write("p.xyz", "0 0\n1 0\n2 0\n3 0\n");
  write("a.part", "0\n0\n1\n1\n");
  write("b.part", "0\n1\n0\n1\n");
  RunConfig config;
  config.graph_paths = {path("p.graph")};
  config.coord_paths = {path("p.xyz")};
  config.algorithms = {"file:" + path("a.part"), "file:" + path("b.part")};
  const auto table = compare(config);
  EXPECT_EQ(table.reference, config.algorithms[0]);
  // a: cut 1, max 1, total 2, diameters (1, 1); b: cut 3, max 2, total 4, unbounded.
  EXPECT_DOUBLE_EQ(*table.ratios[1][0], 3.0);
  EXPECT_DOUBLE_EQ(*table.ratios[1][1], 2.0);
  EXPECT_DOUBLE_EQ(*table.ratios[1][2], 2.0);
  EXPECT_EQ(*table.ratios[1][3], std::numeric_limits<double>::infinity());
}

TEST_F(Commands, CompareTableShape) {
  RunConfig config;
  for (int i = 0; i < 3; ++i) {
    RunConfig gen;
    gen.n = 3000;
    gen.seed = static_cast<std::uint64_t>(i);
    gen.graph_paths = {path("r" + std::to_string(i) + ".graph")};
    gen.coord_paths = {path("r" + std::to_string(i) + ".xyz")};
    std::ostringstream sink;
    cmd_generate(gen, sink);
    config.graph_paths.push_back(gen.graph_paths[0]);
    config.coord_paths.push_back(gen.coord_paths[0]);
  }
  config.algorithms = {"geographer", "rcb", "sfc", "file:" + path("missing.part")};
  config.k = 8;
  config.report_path = path("cmp.csv");
  std::ostringstream out;
  EXPECT_EQ(cmd_compare(config, out), kExitOk);
  const auto table = compare(config);
  ASSERT_EQ(table.ratios.size(), 4u);
  for (std::size_t a = 0; a < 3; ++a) {
    for (const auto& r : table.ratios[a]) EXPECT_TRUE(r);
  }
  for (const auto& r : table.ratios[3]) EXPECT_FALSE(r);
  EXPECT_NE(out.str().find("missing: instance 0"), std::string::npos);
  std::istringstream csv(read("cmp.csv"));
  std::string line;
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 1u + 3 * 4);
}

TEST_F(Commands, MissingFileIsInputError) {
  RunConfig config;
  config.graph_paths = {path("nope.graph")};
  config.coord_paths = {path("nope.xyz")};
  std::ostringstream out;
  EXPECT_THROW(cmd_partition(config, out), InputError);
}
