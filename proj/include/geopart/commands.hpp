#pragma once

// Command implementations behind the geopart CLI. Each command reads and
// writes files named in a RunConfig and returns a process exit status.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "geopart/baselines.hpp"
#include "geopart/errors.hpp"
#include "geopart/generators.hpp"
#include "geopart/io.hpp"
#include "geopart/kmeans.hpp"
#include "geopart/metrics.hpp"

namespace geopart {

enum ExitStatus : int { kExitOk = 0, kExitError = 1, kExitUnbalanced = 2 };

struct RunConfig {
  std::string command;
  std::vector<std::string> graph_paths;
  std::vector<std::string> coord_paths;
  std::string out_path;        // partition output
  std::string report_path;     // machine-readable report
  std::string partition_path;  // evaluate input
  std::string log_path;        // collective log dump
  std::string algorithm = "geographer";
  // compare: geographer, rcb, sfc or file:<partition path>
  std::vector<std::string> algorithms;
  std::size_t k = 2;
  double epsilon = 0.03;
  std::uint64_t seed = 0;
  std::size_t ranks = 1;
  std::size_t max_iter = 50;
  std::size_t max_balance_iter = 20;
  // generate
  std::string kind = "rgg";
  std::size_t n = 1000;
  std::size_t dim = 2;
  double degree = 12.0;
  std::size_t side = 10;

  void validate() const {
    if (k < 1) throw InputError("--k must be at least 1");
    if (ranks < 1) throw InputError("--p must be at least 1");
    if (!(epsilon >= 0.0)) throw InputError("--epsilon must be nonnegative");
    if (dim != 2 && dim != 3) throw InputError("--dim must be 2 or 3");
  }
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  return out;
}

inline std::size_t coordinate_dimension(const std::string& coord_text, const std::string& path) {
  std::istringstream in(coord_text);
  const std::size_t dim = detect_coordinate_dimension(in);
  if (dim != 2 && dim != 3) {
    throw InputError("'" + path + "': expected 2 or 3 coordinates per line, found " +
                     std::to_string(dim));
  }
  return dim;
}

template <std::size_t D>
GeometricGraph<D> load_files(const std::string& graph_path, const std::string& graph_text,
                             const std::string& coord_path, const std::string& coord_text) {
  std::istringstream graph_in(graph_text);
  std::istringstream coord_in(coord_text);
  return load_metis_graph<D>(graph_in, coord_in, graph_path, coord_path);
}

// Calls fn(graph) with the graph loaded at its detected dimension.
template <typename Fn>
decltype(auto) with_graph(const std::string& graph_path, const std::string& coord_path, Fn&& fn) {
  const std::string graph_text = read_file(graph_path);
  const std::string coord_text = read_file(coord_path);
  if (coordinate_dimension(coord_text, coord_path) == 2) {
    return fn(load_files<2>(graph_path, graph_text, coord_path, coord_text));
  }
  return fn(load_files<3>(graph_path, graph_text, coord_path, coord_text));
}

inline double ratio(double value, double reference) {
  if (value == reference) return 1.0;
  if (reference == 0.0) return std::numeric_limits<double>::infinity();
  return value / reference;
}

}  // namespace detail

struct AlgorithmRun {
  Partition partition;
  bool balanced = true;
  double imbalance = 0.0;
  std::size_t iterations = 0;
  double seconds = 0.0;
  CollectiveLog log;
};

inline KMeansSettings kmeans_settings(const RunConfig& config) {
  KMeansSettings settings;
  settings.k = config.k;
  settings.epsilon = config.epsilon;
  settings.seed = config.seed;
  settings.max_iter = config.max_iter;
  settings.max_balance_iter = config.max_balance_iter;
  return settings;
}

// Runs one of geographer, rcb, sfc or file:<path> on a loaded graph.
template <std::size_t D>
AlgorithmRun run_algorithm(const GeometricGraph<D>& graph, const std::string& algorithm,
                           const RunConfig& config) {
  AlgorithmRun run;
  const auto start = std::chrono::steady_clock::now();
  if (algorithm == "geographer") {
    auto result = balanced_kmeans<D>(graph, kmeans_settings(config), config.ranks);
    run.partition = std::move(result.partition);
    run.iterations = result.iterations;
    run.log = result.log;
  } else if (algorithm == "rcb") {
    run.partition = rcb_partition<D>(graph, config.k, config.epsilon);
  } else if (algorithm == "sfc") {
    run.partition = sfc_partition<D>(graph, config.k);
  } else if (algorithm.rfind("file:", 0) == 0) {
    const std::string path = algorithm.substr(5);
    std::istringstream in(detail::read_file(path));
    run.partition = read_partition(in, path);
    if (run.partition.size() != graph.num_vertices()) {
      throw InputError("'" + path + "' has " + std::to_string(run.partition.size()) +
                       " entries for a graph with " + std::to_string(graph.num_vertices()) +
                       " vertices");
    }
  } else {
    throw InputError("unknown algorithm '" + algorithm + "'");
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run.imbalance = imbalance(block_weights(graph, run.partition));
  run.balanced = run.imbalance <= config.epsilon;
  return run;
}

inline int cmd_generate(const RunConfig& config, std::ostream& out) {
  config.validate();
  if (config.graph_paths.size() != 1 || config.coord_paths.size() != 1) {
    throw InputError("generate needs one --graph and one --coords output path");
  }
  auto emit = [&](const auto& graph) {
    auto graph_out = detail::open_output(config.graph_paths.front());
    write_metis_graph(graph, graph_out);
    auto coord_out = detail::open_output(config.coord_paths.front());
    write_coordinates(std::span(graph.coords()), coord_out);
    if (!graph_out || !coord_out) throw std::runtime_error("write failure");
    out << "generated n=" << graph.num_vertices() << " m=" << graph.num_edges() << '\n';
  };
  if (config.kind == "grid") {
    if (config.dim == 2) {
      emit(grid_mesh<2>(config.side));
    } else {
      emit(grid_mesh<3>(config.side));
    }
  } else if (config.kind == "rgg") {
    if (config.dim == 2) {
      emit(random_geometric_graph<2>(config.n, config.degree, config.seed));
    } else {
      emit(random_geometric_graph<3>(config.n, config.degree, config.seed));
    }
  } else {
    throw InputError("unknown generator kind '" + config.kind + "' (expected rgg or grid)");
  }
  return kExitOk;
}

// Writes the partition and prints one summary line. Returns kExitUnbalanced
// (with the partition still written) when the imbalance exceeds epsilon.
inline int cmd_partition(const RunConfig& config, std::ostream& out) {
  config.validate();
  if (config.graph_paths.size() != 1 || config.coord_paths.size() != 1) {
    throw InputError("partition needs one --graph and one --coords path");
  }
  return detail::with_graph(config.graph_paths.front(), config.coord_paths.front(),
                            [&](const auto& graph) {
    const AlgorithmRun run = run_algorithm(graph, config.algorithm, config);
    if (!config.out_path.empty()) {
      auto file = detail::open_output(config.out_path);
      write_partition(run.partition, file);
    }
    if (!config.log_path.empty()) {
      auto file = detail::open_output(config.log_path);
      run.log.dump(file);
    }
    std::ostringstream line;
    line << "algo=" << config.algorithm << " k=" << config.k << " epsilon=" << config.epsilon
         << " imbalance=" << std::setprecision(6) << run.imbalance
         << " cut=" << edge_cut(graph, run.partition) << " iterations=" << run.iterations
         << " balanced=" << (run.balanced ? "yes" : "no") << " seconds=" << std::fixed
         << std::setprecision(3) << run.seconds << '\n';
    out << line.str();
    return run.balanced ? kExitOk : kExitUnbalanced;
  });
}

inline int cmd_evaluate(const RunConfig& config, std::ostream& out) {
  if (config.graph_paths.size() != 1 || config.partition_path.empty()) {
    throw InputError("evaluate needs --graph and --partition");
  }
  const std::string& graph_path = config.graph_paths.front();
  std::istringstream part_in(detail::read_file(config.partition_path));
  Partition part = read_partition(part_in, config.partition_path);
  std::istringstream graph_in(detail::read_file(graph_path));
  const auto graph = load_metis_topology(graph_in, graph_path);
  if (part.size() != graph.num_vertices()) {
    throw InputError("'" + config.partition_path + "' has " + std::to_string(part.size()) +
                     " entries but '" + graph_path + "' has " +
                     std::to_string(graph.num_vertices()) + " vertices");
  }
  if (config.k > static_cast<std::size_t>(part.k)) part.k = static_cast<BlockId>(config.k);
  const MetricsReport report = evaluate(graph, part);
  write_summary(report, out);
  if (!config.report_path.empty()) {
    auto file = detail::open_output(config.report_path);
    write_records(report, file);
  }
  return kExitOk;
}

// Metric columns of a comparison, in table order.
inline constexpr std::size_t kCompareMetrics = 4;
inline constexpr const char* kCompareMetricNames[kCompareMetrics] = {"edge_cut", "max_comm",
                                                                     "total_comm", "diameter"};

struct CompareRecord {
  std::size_t instance = 0;
  std::string algorithm;
  std::optional<MetricsReport> report;  // empty when the run failed
  bool balanced = false;
  double seconds = 0.0;
  std::string error;
};

struct ComparisonTable {
  std::vector<std::string> algorithms;
  std::string reference;
  // ratios[a][metric]: aggregated ratio of algorithm a to the reference;
  // empty when no instance produced both values.
  std::vector<std::array<std::optional<double>, kCompareMetrics>> ratios;
  std::vector<CompareRecord> records;
};

inline std::array<double, kCompareMetrics> compare_values(const MetricsReport& report) {
  return {report.edge_cut, static_cast<double>(report.max_comm),
          static_cast<double>(report.total_comm), report.harmonic_mean_diameter};
}

// Runs every algorithm on every input and aggregates per-instance ratios to
// the reference (geographer when requested, else the first algorithm):
// geometric mean for cut and volumes, harmonic mean for diameter.
inline ComparisonTable compare(const RunConfig& config) {
  config.validate();
  if (config.algorithms.size() < 2) throw InputError("compare needs at least two algorithms");
  if (config.graph_paths.empty() || config.graph_paths.size() != config.coord_paths.size()) {
    throw InputError("compare needs matching --graph and --coords lists");
  }
  ComparisonTable table;
  table.algorithms = config.algorithms;
  table.reference = config.algorithms.front();
  for (const auto& a : config.algorithms) {
    if (a == "geographer") table.reference = a;
  }

  for (std::size_t i = 0; i < config.graph_paths.size(); ++i) {
    for (const auto& algorithm : config.algorithms) {
      CompareRecord record;
      record.instance = i;
      record.algorithm = algorithm;
      try {
        detail::with_graph(config.graph_paths[i], config.coord_paths[i], [&](const auto& graph) {
          const AlgorithmRun run = run_algorithm(graph, algorithm, config);
          record.report = evaluate(graph, run.partition);
          record.balanced = run.balanced;
          record.seconds = run.seconds;
        });
      } catch (const std::exception& e) {
        record.error = e.what();
      }
      table.records.push_back(std::move(record));
    }
  }

  const std::size_t algos = config.algorithms.size();
  const std::size_t ref_index = static_cast<std::size_t>(
      std::find(table.algorithms.begin(), table.algorithms.end(), table.reference) -
      table.algorithms.begin());
  table.ratios.resize(algos);
  for (std::size_t a = 0; a < algos; ++a) {
    for (std::size_t m = 0; m < kCompareMetrics; ++m) {
      std::vector<double> per_instance;
      for (std::size_t i = 0; i < config.graph_paths.size(); ++i) {
        const auto& cell = table.records[i * algos + a].report;
        const auto& ref = table.records[i * algos + ref_index].report;
        if (!cell || !ref) continue;
        per_instance.push_back(detail::ratio(compare_values(*cell)[m], compare_values(*ref)[m]));
      }
      if (per_instance.empty()) continue;
      table.ratios[a][m] = m + 1 == kCompareMetrics ? harmonic_mean(std::span<const double>(per_instance))
                                                    : geometric_mean(std::span<const double>(per_instance));
    }
  }
  return table;
}

// Records: instance,algorithm,edge_cut,max_comm,total_comm,harmonic_mean_diameter,imbalance,balanced,seconds
inline void write_compare_records(const ComparisonTable& table, const RunConfig& config,
                                  std::ostream& out) {
  out << "instance,algorithm,edge_cut,max_comm,total_comm,harmonic_mean_diameter,imbalance,"
         "balanced,seconds\n";
  for (const auto& r : table.records) {
    out << config.graph_paths[r.instance] << ',' << r.algorithm << ',';
    if (!r.report) {
      out << ",,,,,,\n";
      continue;
    }
    std::string row;
    auto add = [&](auto value) {
      detail::append_number(row, value);
      row += ',';
    };
    add(r.report->edge_cut);
    add(r.report->max_comm);
    add(r.report->total_comm);
    add(r.report->harmonic_mean_diameter);
    add(r.report->imbalance);
    row += r.balanced ? "yes," : "no,";
    add(r.seconds);
    row.pop_back();
    out << row << '\n';
  }
}

inline int cmd_compare(const RunConfig& config, std::ostream& out) {
  const ComparisonTable table = compare(config);
  out << "ratios relative to " << table.reference
      << " (geometric mean; harmonic mean for diameter)\n";
  out << std::left << std::setw(24) << "algorithm";
  for (const char* name : kCompareMetricNames) out << std::setw(12) << name;
  out << '\n';
  for (std::size_t a = 0; a < table.algorithms.size(); ++a) {
    out << std::setw(24) << table.algorithms[a];
    for (const auto& value : table.ratios[a]) {
      std::ostringstream cell;
      if (value) {
        cell << std::fixed << std::setprecision(4) << *value;
      } else {
        cell << "-";
      }
      out << std::setw(12) << cell.str();
    }
    out << '\n';
  }
  for (const auto& r : table.records) {
    if (!r.report) {
      out << "missing: instance " << r.instance << " " << r.algorithm << ": " << r.error << '\n';
    }
  }
  if (!config.report_path.empty()) {
    auto file = detail::open_output(config.report_path);
    write_compare_records(table, config, file);
  }
  return kExitOk;
}

}  // namespace geopart
