#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lss/sparse.hpp"

namespace lss {

// Elements E_k (disjoint, covering all vertices), neighbor lists N_k
// (element ids, always containing k) and extended elements Q_k with E_k in Q_k.
struct Partition {
  Index n = 0;
  std::vector<IndexSet> elements;
  std::vector<Index> xi;  // vertex -> element
  std::vector<IndexSet> neighbors;
  std::vector<IndexSet> extended;
  // BFS radius used for Q_k; -1 when Q_k is the union of neighbor elements.
  int hops = -1;

  Index element_count() const noexcept { return static_cast<Index>(elements.size()); }
  // Mean |Q_k| / |E_k|.
  double c_q() const;

  // Throws InputError when coverage, disjointness, k in N_k or E_k in Q_k fails.
  void validate() const;
};

// Contiguous blocks of n/M vertices; Q_k = E_{k-1} u E_k u E_{k+1} (periodic).
Partition partition_structured_1d(Index n, Index m);

// sqrt(M) x sqrt(M) tiles of an nx-by-ny grid (vertex iy*nx+ix); Q_k is the
// tile plus its 8 periodic neighbours. Element id = ty*sqrt(M) + tx.
Partition partition_structured_2d(Index nx, Index ny, Index m);

struct GraphPartitionOptions {
  double imbalance = 0.05;      // max part weight <= (1+imbalance) * ideal
  Index coarsen_to = 64;        // coarsest graph size per bisection
  int refinement_passes = 8;
  std::uint64_t seed = 1;       // matching visit order
};

// Multilevel recursive bisection: heavy-edge matching, greedy graph growing
// on the coarsest graph, boundary Fiduccia-Mattheyses refinement on the way
// back up. Parts are relabelled by their smallest vertex so the map does not
// depend on recursion order.
std::vector<Index> graph_partition(const SparseHermitian& a, Index m,
                                   const GraphPartitionOptions& options = {});

// Number of edges (i<j, A_ij != 0) whose endpoints lie in different parts.
Index edge_cut(const SparseHermitian& a, std::span<const Index> xi);

// Elements from a vertex map, neighbor lists from the nonzero pattern and
// Q_k as the union of neighbouring elements.
Partition partition_from_map(const SparseHermitian& a, std::span<const Index> xi);

Partition partition_general(const SparseHermitian& a, Index m, const GraphPartitionOptions& options = {});

// Q_k = all vertices within BFS distance m of some vertex of E_k.
std::vector<IndexSet> extended_elements_mhop(const SparseHermitian& a,
                                             std::span<const IndexSet> elements, std::uint32_t m);

// Same elements, Q_k replaced by the m-hop balls; neighbor lists become the
// elements met by each Q_k.
Partition with_mhop_extension(const SparseHermitian& a, const Partition& p, std::uint32_t m);

// Largest r such that the BFS ball of radius r around every vertex of E_k
// stays inside Q_k, minimised over k (nullopt when every Q_k is the whole
// connected reach of its element).
std::optional<Index> effective_hops(const SparseHermitian& a, const Partition& p);

// Partition of P A P^T, where vertex v maps to perm[v].
Partition permuted(const Partition& p, std::span<const Index> perm);

}  // namespace lss
