#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lss/index_set.hpp"

namespace lss {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Triplet {
  Index row;
  Index col;
  double value;
};

// Real symmetric (Hermitian) matrix in CSR form with sorted column indices.
//
// The pattern is structurally symmetric and values satisfy a(i,j) == a(j,i)
// bitwise. Construction from triplets sums duplicates and then averages with
// the transpose; the largest relative asymmetry seen before averaging is kept
// in max_asymmetry().
class SparseHermitian {
 public:
  SparseHermitian() = default;

  static SparseHermitian from_triplets(Index n, std::span<const Triplet> entries,
                                       bool symmetric_storage = false);
  static SparseHermitian from_dense(const Matrix& dense, double drop_tol = 0.0);

  Index size() const noexcept { return n_; }
  Index nnz() const noexcept { return static_cast<Index>(col_idx_.size()); }

  std::span<const Index> row_ptr() const noexcept { return row_ptr_; }
  std::span<const Index> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const Index> row_cols(Index i) const noexcept {
    return {col_idx_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  std::span<const double> row_values(Index i) const noexcept {
    return {values_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }

  // Zero if (i,j) is not stored.
  double coeff(Index i, Index j) const;

  double max_abs() const noexcept;
  double max_asymmetry() const noexcept { return max_asymmetry_; }
  bool symmetric_storage() const noexcept { return symmetric_storage_; }

  Matrix to_dense() const;

  // P A P^T where vertex v of this matrix becomes vertex perm[v].
  SparseHermitian permuted(std::span<const Index> perm) const;

  friend bool operator==(const SparseHermitian&, const SparseHermitian&) = default;

 private:
  Index n_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
  double max_asymmetry_ = 0.0;
  bool symmetric_storage_ = false;
};

// Per-vertex BFS distance from a source set.
struct DistanceMap {
  static constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

  IndexSet sources;
  std::vector<std::uint32_t> distance;

  bool reachable(Index v) const { return distance[static_cast<std::size_t>(v)] != kUnreachable; }
  std::uint32_t operator[](Index v) const { return distance[static_cast<std::size_t>(v)]; }
};

inline constexpr std::uint32_t kNoCutoff = DistanceMap::kUnreachable - 1;

// Multi-source BFS over the graph of nonzeros. Vertices farther than cutoff
// are marked unreachable. d(i,i) = 0.
DistanceMap geodesic_distances(const SparseHermitian& a, const IndexSet& sources,
                               std::uint32_t cutoff = kNoCutoff);

// Principal submatrix A(Q,Q), indexed locally by position in Q.
SparseHermitian extract_submatrix(const SparseHermitian& a, const IndexSet& q);

// Dense product A*B. Rows are distributed over OpenMP threads.
Matrix spmm(const SparseHermitian& a, const Matrix& b);

// y = A x
Vector spmv(const SparseHermitian& a, const Vector& x);

struct SpectralInterval {
  double lo = 0.0;
  double hi = 0.0;

  double center() const noexcept { return 0.5 * (lo + hi); }
  double half_width() const noexcept { return 0.5 * (hi - lo); }
  bool contains(double z) const noexcept { return z >= lo && z <= hi; }
};

struct SpectralIntervalOptions {
  bool lanczos = false;  // tighten Gershgorin with extremal Lanczos estimates
  int iters = 40;
  double inflate = 0.01;  // relative re-inflation of the Lanczos interval
};

SpectralInterval gershgorin_interval(const SparseHermitian& a);

// Gershgorin enclosure by default. With lanczos enabled the interval is the
// Lanczos Ritz range widened by `inflate` of its width, clipped to Gershgorin.
SpectralInterval spectral_interval(const SparseHermitian& a,
                                   const SpectralIntervalOptions& options = {});

}  // namespace lss
