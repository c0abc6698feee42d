#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "lss/io.hpp"
#include "lss/model.hpp"
#include "lss/partition.hpp"
#include "lss/pipeline.hpp"

namespace lss::cli {

// model: "1d", "2d", "laplacian" (1d grid with V = 0) or "matrix".
struct InputSpec {
  std::string model = "1d";
  ModelSpec1D m1;
  ModelSpec2D m2;
  std::filesystem::path matrix;
};

// kind: "structured", "general" or "map".
struct PartitionSpec {
  std::string kind = "structured";
  std::optional<Index> elements;  // default 8, 16 for the 2d model
  std::filesystem::path map;
  std::optional<int> hops;  // m-hop extended sets instead of element neighbours
  std::uint64_t seed = 1;   // graph partitioner
};

// mu = 2, tau = 0.032; everything else at the library defaults.
inline SliceOptions default_slice_options() {
  SliceOptions o;
  o.params.mu = 2.0;
  o.params.tau = 0.032;
  return o;
}

struct RunConfig {
  InputSpec input;
  PartitionSpec partition;
  SliceOptions slice = default_slice_options();
  std::optional<std::filesystem::path> output;
  std::uint64_t seed = 0;
  bool oracle = false;
  Index oracle_cap = 5000;
  int threads = 0;  // 0: runtime default

  Index element_count() const;
};

LocalSolver parse_solver(const std::string& v);
AssemblyMode parse_assembly(const std::string& v);

// Throws InputError on an inconsistent config.
void validate_config(const RunConfig& c);

// Accepts a RunConfig object or a provenance record carrying one under "config".
RunConfig config_from_json(const io::Json& j);
RunConfig load_config(const std::filesystem::path& path);
io::Json config_to_json(const RunConfig& c);

SparseHermitian build_matrix(const RunConfig& c);
Partition build_partition(const SparseHermitian& a, const RunConfig& c);

// Provenance of the resolved config, with the config itself under "config".
io::Json run_provenance(const RunConfig& c);

}  // namespace lss::cli
