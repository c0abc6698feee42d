#pragma once

#include <vector>

#include "lss/lss_basis.hpp"
#include "lss/projection.hpp"

// Single-threaded reference versions of the OpenMP kernels. They perform the
// same floating-point operations in the same order, so results are bitwise
// equal to the parallel versions for any thread count.
namespace lss::serial {

Matrix spmm(const SparseHermitian& a, const Matrix& b);
LssBasis build_lss_basis(const SparseHermitian& a, const Partition& p, const SliceParams& params);
ProjectedPencil assemble_pencil(const SparseHermitian& a, const Partition& p, const LssBasis& basis,
                                AssemblyMode mode = AssemblyMode::local);
std::vector<double> residual_norms_local(const ProjectedPencil& pencil, const LssBasis& basis,
                                         const Partition& p, const Matrix& c, const Vector& theta);
std::vector<double> residual_norms_global(const SparseHermitian& a, const LssBasis& basis, const Partition& p,
                                          const Matrix& c, const Vector& theta);

}  // namespace lss::serial

namespace lss::detail {

LssBasis build_lss_basis(const SparseHermitian& a, const Partition& p, const SliceParams& params, bool parallel);
ProjectedPencil assemble_pencil(const SparseHermitian& a, const Partition& p, const LssBasis& basis,
                                AssemblyMode mode, bool parallel);
std::vector<double> residual_norms_local(const ProjectedPencil& pencil, const LssBasis& basis, const Partition& p,
                                         const Matrix& c, const Vector& theta, bool parallel);
std::vector<double> residual_norms_global(const SparseHermitian& a, const LssBasis& basis, const Partition& p,
                                          const Matrix& c, const Vector& theta, bool parallel);

}  // namespace lss::detail
