#pragma once

#include <optional>

#include "lss/decay.hpp"
#include "lss/lss_basis.hpp"
#include "lss/partition.hpp"

namespace lss {

struct OperatorValidation {
  double measured = 0;        // ||f(A) - f~||_max
  double f_max = 0;           // ||f(A)||_max
  double relative = 0;        // measured / f_max
  std::optional<Index> hops;  // effective m of the partition; empty when Q_k covers its component
  Index hops_even = 0;
  double sigma_hat = 0;
  double mu_hat = 0;
  double alpha = 1;
  double K = 0;
  double rho = 0;
  double distance_term = 0;  // 2 K rho^{m/2+1}, 0 when hops is empty
  double tau_term = 0;       // max_k tau * S~_k,11
  double bound = 0;          // distance_term + tau_term
  // e^{-c^2}: weight of the local eigenpairs left out by a finite eigen-window.
  double window_tail = 0;
  double roundoff = 0;       // 1e3 eps max(1, f_max)
  bool sound = false;        // measured <= bound + window_tail + roundoff
};

// f_exact is the dense f_{sigma,mu}(A). The spectrum of A is mapped into
// (-1, 1) with `interval` inflated by 1%; alpha is optimised for the
// truncation bound at the effective hop count.
OperatorValidation validate_operator(const SparseHermitian& a, const Partition& p, const LssBasis& basis,
                                     const SliceParams& params, const Matrix& f_exact,
                                     const SpectralInterval& interval);

}  // namespace lss
