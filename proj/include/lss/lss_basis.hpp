#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "lss/partition.hpp"
#include "lss/sparse.hpp"

namespace lss {

enum class LocalSolver { automatic, dense, iterative };
enum class SvdOperand { element, extended };

struct SliceParams {
  double mu = 0;
  double sigma = 1;
  double tau = 0.1;
  // Local eigen-window (mu - c sigma, mu + c sigma); infinity keeps every pair.
  double c_window = 3.0;
  LocalSolver solver = LocalSolver::automatic;
  Index dense_limit = 2000;  // automatic picks dense for |Q_k| <= dense_limit
  // Columns of X_k^T entering the local SVD: rows in E_k or all of Q_k.
  SvdOperand svd_operand = SvdOperand::element;
  bool keep_eigvecs = false;

  // Iterative solver controls.
  Index iter_block = 50;
  double iter_tol = 1e-10;
  int iter_max_sweeps = 400;

  void validate() const;
  double window_lo() const noexcept { return mu - c_window * sigma; }
  double window_hi() const noexcept { return mu + c_window * sigma; }
};

struct LocalEig {
  Vector values;   // ascending, all inside the open window
  Matrix vectors;  // |Q| x s, orthonormal columns
  bool iterative = false;
  double max_residual = 0;
};

// Eigenpairs of a (small, sparse) symmetric matrix in the open window
// (lo, hi); hi - lo may be infinite.
LocalEig local_partial_eig(const SparseHermitian& a_local, const SliceParams& params);
LocalEig local_partial_eig_dense(const Matrix& a_local, double lo, double hi);
LocalEig local_partial_eig_iterative(const SparseHermitian& a_local, const SliceParams& params);

// exp(-(lambda - mu)^2 / sigma^2), elementwise.
Vector gaussian_filter(const Vector& d, double mu, double sigma);

struct TruncatedSvd {
  Matrix u;                 // rows(W) x t
  Vector singular_values;   // all of them, descending
  Matrix vt;                // t x cols(W), already scaled: S~ V~^T
  Index kept = 0;
  double tau_abs = 0;       // tau * S~_11
};

// Thin SVD of w, keeping singular values strictly above tau * s_max. The
// returned vt holds S~ V~^T restricted to the kept rows. Left vectors are not
// sign-normalised here.
TruncatedSvd local_svd_truncate(const Matrix& w, double tau);

struct ElementBasis {
  Index kappa = 0;
  Vector eigvals;          // D_k
  Matrix eigvecs;          // X_k (only when keep_eigvecs)
  Matrix u;                // |Q_k| x t_k
  Matrix v;                // t_k x |E_k|
  Vector singular_values;  // before truncation
  Index s = 0;
  Index t = 0;
  double tau_abs = 0;
  bool iterative = false;
  double eig_seconds = 0;
  double svd_seconds = 0;
};

ElementBasis build_element_basis(const SparseHermitian& a_local, const IndexSet& e, const IndexSet& q,
                                 const SliceParams& params, Index kappa = 0);

struct LssBasis {
  std::vector<ElementBasis> elements;
  std::vector<Index> offsets;  // size M + 1, offsets[k] = first global column of U_k
  Index n_b = 0;
  std::vector<Index> empty_elements;
  double max_tau_abs = 0;
  double max_singular_value = 0;
};

// Elements are built concurrently and merged in element order. Failures are
// collected and rethrown as one Error naming every failing element.
LssBasis build_lss_basis(const SparseHermitian& a, const Partition& p, const SliceParams& params);

void finalize_offsets(LssBasis& basis);

// Sparse n x n matrix with f~(Q_k, E_k) = U_k V_k; zero elsewhere.
Eigen::SparseMatrix<double> assemble_approx_operator(const LssBasis& basis, const Partition& p);

}  // namespace lss
