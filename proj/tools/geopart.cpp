// geopart: generate meshes, partition them, evaluate and compare partitions.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "geopart/commands.hpp"

namespace {

void add_run_flags(CLI::App* cmd, geopart::RunConfig& config) {
  cmd->add_option("--k", config.k, "number of blocks")->check(CLI::PositiveNumber);
  cmd->add_option("--epsilon", config.epsilon, "maximum imbalance")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", config.seed, "random seed");
  cmd->add_option("--p", config.ranks, "simulated rank count")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", config.max_iter, "k-means movement iterations");
  cmd->add_option("--max-balance-iter", config.max_balance_iter, "balance rounds per movement");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric mesh partitioning with balanced k-means"};
  app.require_subcommand(1);
  geopart::RunConfig config;

  auto* generate = app.add_subcommand("generate", "write a METIS graph and coordinate file");
  generate->add_option("--kind", config.kind, "rgg or grid")->check(CLI::IsMember({"rgg", "grid"}));
  generate->add_option("--n", config.n, "vertex count (rgg)");
  generate->add_option("--dim", config.dim, "dimension")->check(CLI::IsMember({2, 3}));
  generate->add_option("--deg", config.degree, "target average degree (rgg)");
  generate->add_option("--side", config.side, "vertices per axis (grid)");
  generate->add_option("--seed", config.seed, "random seed");
  generate->add_option("--graph", config.graph_paths, "graph output path")->required()->expected(1);
  generate->add_option("--coords", config.coord_paths, "coordinate output path")->required()->expected(1);

  auto* partition = app.add_subcommand("partition", "partition a graph");
  partition->add_option("--graph", config.graph_paths, "METIS graph")->required()->expected(1);
  partition->add_option("--coords", config.coord_paths, "coordinate file")->required()->expected(1);
  partition->add_option("--algo", config.algorithm, "geographer, rcb or sfc");
  partition->add_option("--out", config.out_path, "partition output path");
  partition->add_option("--log", config.log_path, "collective log output path");
  add_run_flags(partition, config);

  auto* evaluate = app.add_subcommand("evaluate", "report partition quality metrics");
  evaluate->add_option("--graph", config.graph_paths, "METIS graph")->required()->expected(1);
  evaluate->add_option("--coords", config.coord_paths, "coordinate file (unused)");
  evaluate->add_option("--partition", config.partition_path, "partition file")->required();
  evaluate->add_option("--k", config.k, "block count (default: largest id + 1)");
  evaluate->add_option("--report", config.report_path, "machine-readable report path");

  auto* compare = app.add_subcommand("compare", "compare partitioners across inputs");
  compare->add_option("--graph", config.graph_paths, "METIS graphs")->required();
  compare->add_option("--coords", config.coord_paths, "coordinate files")->required();
  compare->add_option("--algos", config.algorithms, "algorithms (geographer, rcb, sfc, file:<path>)")
      ->delimiter(',')
      ->required();
  compare->add_option("--report", config.report_path, "per-run records path");
  add_run_flags(compare, config);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return geopart::cmd_generate(config, std::cout);
    if (*partition) return geopart::cmd_partition(config, std::cout);
    if (*evaluate) return geopart::cmd_evaluate(config, std::cout);
    if (*compare) return geopart::cmd_compare(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return geopart::kExitError;
  }
  return geopart::kExitError;
}
