#pragma once

#include <optional>

#include "lss/sparse.hpp"

// Dense reference computations used to validate the localized pipeline.
// Self-contained: the eigensolver here does not share code with the
// Eigen-backed solvers used by the basis construction.
namespace lss::oracle {

inline constexpr Index kDefaultCap = 5000;

struct DenseEig {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns; empty when only values were requested
};

// Householder tridiagonalization followed by implicit-shift QL.
// Throws InputError when the matrix exceeds `cap` and ConvergenceError if the
// QL sweep does not deflate within 60 iterations per eigenvalue.
DenseEig dense_eig(const Matrix& a, bool want_vectors = true, Index cap = kDefaultCap);

Matrix apply_function_gaussian(const DenseEig& eig, double mu, double sigma);

// f(A) = X diag(exp(-(lambda-mu)^2/sigma^2)) X^T
Matrix exact_lss_operator(const Matrix& a, double mu, double sigma, Index cap = kDefaultCap);

double max_norm_error(const Matrix& f, const Matrix& g);

// Eigenvalues strictly inside (lo, hi), ascending.
Vector eigs_in_window(const DenseEig& eig, double lo, double hi);
Vector eigs_in_window(const Matrix& a, double lo, double hi, Index cap = kDefaultCap);

// Comparison of Ritz values against reference eigenvalues. Sorted pairing is
// the optimal assignment on |lambda - theta| for equal counts on the line.
struct RitzComparison {
  Index reference_count = 0;
  Index ritz_count = 0;
  bool count_match = false;
  // max_j |lambda_j - theta_j| under sorted pairing; only meaningful on a count match.
  double max_pair_error = 0.0;
  // max over theta of the distance to the nearest reference eigenvalue.
  double max_nearest_error = 0.0;
};

RitzComparison compare_ritz(const Vector& reference, const Vector& ritz,
                            std::optional<Vector> all_eigenvalues = std::nullopt);

}  // namespace lss::oracle
