#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lss/lss_basis.hpp"
#include "lss/partition.hpp"
#include "lss/pipeline.hpp"

namespace lss::io {

using Json = nlohmann::ordered_json;

// Binary basis container, little-endian:
//   "LSSBASIS" | u32 version | u32 flags (bit 0: V blocks present)
//   u64 n | u64 M | u64 offsets[M+1]
//   per element: u64 t | u64 |Q| | u64 |E| | u64 Q[|Q|] | f64 U[|Q|*t] (column-major)
//                [f64 V[t*|E|] column-major]
inline constexpr char kBasisMagic[8] = {'L', 'S', 'S', 'B', 'A', 'S', 'I', 'S'};
inline constexpr std::uint32_t kBasisVersion = 1;

struct StoredBasis {
  Index n = 0;
  std::vector<Index> offsets;
  std::vector<IndexSet> extended;
  std::vector<Matrix> u;
  std::vector<Matrix> v;  // empty matrices when V was not stored
  std::vector<Index> element_sizes;
};

void write_basis(std::ostream& out, const LssBasis& basis, const Partition& p, bool with_v = true);
void write_basis(const std::filesystem::path& path, const LssBasis& basis, const Partition& p, bool with_v = true);
StoredBasis read_basis(std::istream& in);
StoredBasis read_basis(const std::filesystem::path& path);

// Columns of X stored as a single element covering all vertices.
void write_vectors(const std::filesystem::path& path, const Matrix& x);

Json basis_metadata(const LssBasis& basis, const Partition& p);

Json slice_result_json(const SliceResult& r, const SliceOptions& options);
void write_slice_csv(std::ostream& out, const SliceResult& r);

// Plain text, line i holds the element id of vertex i.
void write_partition_map(std::ostream& out, std::span<const Index> xi);
void write_partition_map(const std::filesystem::path& path, std::span<const Index> xi);
std::vector<Index> read_partition_map(std::istream& in);
std::vector<Index> read_partition_map(const std::filesystem::path& path);

Json partition_summary(const Partition& p, const SparseHermitian* a = nullptr);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(std::string_view text);

Json provenance(const std::string& config_text, std::uint64_t seed);

// %.17g
std::string format_double(double v);

}  // namespace lss::io
