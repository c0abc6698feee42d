#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "lss/lss_basis.hpp"
#include "lss/partition.hpp"
#include "lss/sparse.hpp"

namespace lss {

// Block-sparse A_U = U^T A U and B_U = U^T U. Block column k holds the blocks
// (k', k) for every k' whose Q_k' meets the support of Z_k (empty elements are skipped).
struct ProjectedPencil {
  struct Column {
    std::vector<Index> rows;  // element ids k', ascending
    std::vector<Matrix> a;
    std::vector<Matrix> b;
  };

  Index n_b = 0;
  std::vector<Index> offsets;
  std::vector<Column> columns;
  std::vector<Matrix> z;        // Z_k, |z_rows[k]| x t_k
  std::vector<IndexSet> z_rows;  // support of Z_k: Q_k, or Q_k plus its one-hop halo

  Index element_count() const noexcept { return static_cast<Index>(columns.size()); }
  Index block_count() const noexcept;
  // Stored entries / n_b^2.
  double fill_fraction() const noexcept;
  Matrix dense_a() const;
  Matrix dense_b() const;
};

// local: Z_k = A_k U_k, the usual approximation of A U_k.
// halo:  Z_k = A U_k exactly, supported on Q_k and its one-hop neighbours.
enum class AssemblyMode { local, halo };

// Z_k per element, blocks U_k'^T Z_k and U_k'^T U_k over the overlaps, then
// A_U <- (A_U + A_U^T)/2 and likewise B_U. Block columns are computed in
// parallel.
ProjectedPencil assemble_pencil(const SparseHermitian& a, const Partition& p, const LssBasis& basis,
                                AssemblyMode mode = AssemblyMode::local);

struct PencilOptions {
  double eps_b = 1e-10;          // drop B_U modes below eps_b * lambda_max
  double indefinite_tol = 1e-10;  // error when lambda_min < -indefinite_tol * lambda_max
};

struct PencilSolution {
  Vector theta;  // ascending
  Matrix c;      // n_b x r, C^T B_U C = I
  Index retained = 0;
  Index dropped = 0;
  double b_min = 0;
  double b_max = 0;
  // lambda_max / lambda_min of B_U; infinite when lambda_min <= 0.
  double condition = 0;
};

PencilSolution solve_pencil(const Matrix& a_u, const Matrix& b_u, const PencilOptions& options = {});
PencilSolution solve_pencil(const ProjectedPencil& pencil, const PencilOptions& options = {});

// Positions j with lo < theta_j < hi, in input order.
std::vector<Index> select_window(const Vector& theta, double lo, double hi);

// ||sum_k (Z_k C_kj - U_k C_kj theta_j)||_2, accumulated on the full index
// range. Columns of c / entries of theta are the candidates.
std::vector<double> residual_norms_local(const ProjectedPencil& pencil, const LssBasis& basis,
                                         const Partition& p, const Matrix& c, const Vector& theta);

// ||A X_j - X_j theta_j||_2 with X_j = sum_k U_k C_kj.
std::vector<double> residual_norms_global(const SparseHermitian& a, const LssBasis& basis, const Partition& p,
                                          const Matrix& c, const Vector& theta);

// Flag r_j > max(eta_abs, eta_rel * median(r)).
std::vector<bool> filter_spurious(const std::vector<double>& residuals, double eta_abs, double eta_rel);
double spurious_threshold(const std::vector<double>& residuals, double eta_abs, double eta_rel);

// X = U C (n x cols), each column scaled to unit norm with its first
// significant entry positive.
Matrix reconstruct_eigenvectors(const LssBasis& basis, const Partition& p, const Matrix& c);

// Unnormalised X = U C.
Matrix expand_coefficients(const LssBasis& basis, const Partition& p, const Matrix& c);

}  // namespace lss
