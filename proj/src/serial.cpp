#include "lss/serial.hpp"

#include <string>

#include "lss/error.hpp"

namespace lss::serial {

Matrix spmm(const SparseHermitian& a, const Matrix& b) {
  if (b.rows() != a.size()) {
    throw DimensionError("spmm: A is " + std::to_string(a.size()) + "x" + std::to_string(a.size()) +
                         " but B has " + std::to_string(b.rows()) + " rows");
  }
  Matrix out(a.size(), b.cols());
  for (Index i = 0; i < a.size(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (Index c = 0; c < b.cols(); ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < cols.size(); ++k) s += vals[k] * b(cols[k], c);
      out(i, c) = s;
    }
  }
  return out;
}

LssBasis build_lss_basis(const SparseHermitian& a, const Partition& p, const SliceParams& params) {
  return detail::build_lss_basis(a, p, params, false);
}

ProjectedPencil assemble_pencil(const SparseHermitian& a, const Partition& p, const LssBasis& basis,
                                AssemblyMode mode) {
  return detail::assemble_pencil(a, p, basis, mode, false);
}

std::vector<double> residual_norms_local(const ProjectedPencil& pencil, const LssBasis& basis,
                                         const Partition& p, const Matrix& c, const Vector& theta) {
  return detail::residual_norms_local(pencil, basis, p, c, theta, false);
}

std::vector<double> residual_norms_global(const SparseHermitian& a, const LssBasis& basis, const Partition& p,
                                          const Matrix& c, const Vector& theta) {
  return detail::residual_norms_global(a, basis, p, c, theta, false);
}

}  // namespace lss::serial
