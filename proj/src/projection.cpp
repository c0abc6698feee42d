#include "lss/projection.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "lss/error.hpp"
#include "lss/serial.hpp"

namespace lss {

namespace {

struct Overlap {
  std::vector<Index> in_left;
  std::vector<Index> in_right;
};

Overlap overlap_positions(const IndexSet& left, const IndexSet& right) {
  Overlap o;
  Index i = 0, j = 0;
  while (i < left.size() && j < right.size()) {
    if (left[i] < right[j]) {
      ++i;
    } else if (right[j] < left[i]) {
      ++j;
    } else {
      o.in_left.push_back(i++);
      o.in_right.push_back(j++);
    }
  }
  return o;
}

Matrix gather_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (Index c = 0; c < m.cols(); ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) out(static_cast<Index>(r), c) = m(rows[r], c);
  }
  return out;
}

// For each k, the elements k' whose Q_k' meets reach[k].
std::vector<std::vector<Index>> overlapping_elements(const Partition& p, const LssBasis& basis,
                                                     const std::vector<IndexSet>& reach) {
  const Index m = p.element_count();
  std::vector<std::vector<Index>> owners(static_cast<std::size_t>(p.n));
  for (Index k = 0; k < m; ++k) {
    if (basis.elements[static_cast<std::size_t>(k)].t == 0) continue;
    for (Index v : p.extended[static_cast<std::size_t>(k)]) owners[static_cast<std::size_t>(v)].push_back(k);
  }
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(m));
  std::vector<Index> mark(static_cast<std::size_t>(m), -1);
  for (Index k = 0; k < m; ++k) {
    if (basis.elements[static_cast<std::size_t>(k)].t == 0) continue;
    auto& list = out[static_cast<std::size_t>(k)];
    for (Index v : reach[static_cast<std::size_t>(k)]) {
      for (Index o : owners[static_cast<std::size_t>(v)]) {
        if (mark[static_cast<std::size_t>(o)] != k) {
          mark[static_cast<std::size_t>(o)] = k;
          list.push_back(o);
        }
      }
    }
    std::sort(list.begin(), list.end());
  }
  return out;
}

// rows = Q plus every vertex adjacent to Q; z = A(rows, Q) * u.
void halo_product(const SparseHermitian& a, const IndexSet& q, const Matrix& u, IndexSet& rows, Matrix& z) {
  const DistanceMap d = geodesic_distances(a, q, 1);
  std::vector<Index> r;
  for (Index v = 0; v < a.size(); ++v) {
    if (d.reachable(v)) r.push_back(v);
  }
  rows = IndexSet(std::move(r));
  z = Matrix::Zero(rows.size(), u.cols());
  for (Index i = 0; i < rows.size(); ++i) {
    const auto cols = a.row_cols(rows[i]);
    const auto vals = a.row_values(rows[i]);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto pos = q.position_of(cols[k]);
      if (pos) z.row(i) += vals[k] * u.row(*pos);
    }
  }
}

void symmetric_eig(Matrix& a, Vector& w) {
  const Index n = a.rows();
  w.resize(n);
  if (n == 0) return;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n), a.data(),
                                         static_cast<lapack_int>(n), w.data());
  if (info != 0) throw ConvergenceError("dsyevd failed with info=" + std::to_string(info));
}

void check_basis(const Partition& p, const LssBasis& basis) {
  if (static_cast<Index>(basis.elements.size()) != p.element_count() ||
      static_cast<Index>(basis.offsets.size()) != p.element_count() + 1) {
    throw DimensionError("basis and partition disagree on the number of elements");
  }
  for (std::size_t k = 0; k < basis.elements.size(); ++k) {
    const auto& el = basis.elements[k];
    if (el.u.rows() != p.extended[k].size() || el.u.cols() != el.t) {
      throw DimensionError("U_" + std::to_string(k) + " has shape " + std::to_string(el.u.rows()) + "x" +
                           std::to_string(el.u.cols()) + ", expected |Q_k|=" +
                           std::to_string(p.extended[k].size()) + " rows");
    }
  }
}

}  // namespace

Index ProjectedPencil::block_count() const noexcept {
  Index c = 0;
  for (const auto& col : columns) c += static_cast<Index>(col.rows.size());
  return c;
}

double ProjectedPencil::fill_fraction() const noexcept {
  if (n_b == 0) return 0.0;
  double stored = 0;
  for (const auto& col : columns) {
    for (const auto& b : col.a) stored += static_cast<double>(b.rows()) * static_cast<double>(b.cols());
  }
  return stored / (static_cast<double>(n_b) * static_cast<double>(n_b));
}

Matrix ProjectedPencil::dense_a() const {
  Matrix out = Matrix::Zero(n_b, n_b);
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const auto& col = columns[k];
    for (std::size_t r = 0; r < col.rows.size(); ++r) {
      const auto& blk = col.a[r];
      out.block(offsets[static_cast<std::size_t>(col.rows[r])], offsets[k], blk.rows(), blk.cols()) = blk;
    }
  }
  return out;
}

Matrix ProjectedPencil::dense_b() const {
  Matrix out = Matrix::Zero(n_b, n_b);
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const auto& col = columns[k];
    for (std::size_t r = 0; r < col.rows.size(); ++r) {
      const auto& blk = col.b[r];
      out.block(offsets[static_cast<std::size_t>(col.rows[r])], offsets[k], blk.rows(), blk.cols()) = blk;
    }
  }
  return out;
}

namespace detail {

ProjectedPencil assemble_pencil(const SparseHermitian& a, const Partition& p, const LssBasis& basis,
                                AssemblyMode mode, bool parallel) {
  if (p.n != a.size()) throw DimensionError("assemble_pencil: partition does not match matrix size");
  check_basis(p, basis);
  const Index m = p.element_count();
  ProjectedPencil out;
  out.n_b = basis.n_b;
  out.offsets = basis.offsets;
  out.columns.resize(static_cast<std::size_t>(m));
  out.z.resize(static_cast<std::size_t>(m));
  out.z_rows.resize(static_cast<std::size_t>(m));

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (Index k = 0; k < m; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const auto& el = basis.elements[ks];
    if (mode == AssemblyMode::local || el.t == 0) {
      out.z_rows[ks] = p.extended[ks];
      if (el.t == 0) {
        out.z[ks].resize(p.extended[ks].size(), 0);
        continue;
      }
      const SparseHermitian local = extract_submatrix(a, p.extended[ks]);
      out.z[ks] = parallel ? spmm(local, el.u) : serial::spmm(local, el.u);
    } else {
      halo_product(a, p.extended[ks], el.u, out.z_rows[ks], out.z[ks]);
    }
  }
  const auto pairs = overlapping_elements(p, basis, out.z_rows);

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (Index k = 0; k < m; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    auto& col = out.columns[ks];
    col.rows = pairs[ks];
    col.a.resize(col.rows.size());
    col.b.resize(col.rows.size());
    const auto& uk = basis.elements[ks].u;
    for (std::size_t r = 0; r < col.rows.size(); ++r) {
      const auto kp = static_cast<std::size_t>(col.rows[r]);
      const Overlap o = overlap_positions(p.extended[kp], p.extended[ks]);
      const Matrix ul = gather_rows(basis.elements[kp].u, o.in_left);
      col.b[r] = ul.transpose() * gather_rows(uk, o.in_right);
      if (mode == AssemblyMode::local) {
        col.a[r] = ul.transpose() * gather_rows(out.z[ks], o.in_right);
      } else {
        const Overlap oz = overlap_positions(p.extended[kp], out.z_rows[ks]);
        col.a[r] = gather_rows(basis.elements[kp].u, oz.in_left).transpose() * gather_rows(out.z[ks], oz.in_right);
      }
    }
  }

  // Symmetrise: block (k', k) and (k, k')^T are averaged and mirrored.
  auto find_block = [&](Index col_k, Index row_k) -> std::size_t {
    const auto& rows = out.columns[static_cast<std::size_t>(col_k)].rows;
    return static_cast<std::size_t>(std::lower_bound(rows.begin(), rows.end(), row_k) - rows.begin());
  };
  for (Index k = 0; k < m; ++k) {
    auto& col = out.columns[static_cast<std::size_t>(k)];
    for (std::size_t r = 0; r < col.rows.size(); ++r) {
      const Index kp = col.rows[r];
      if (kp > k) break;
      if (kp == k) {
        Matrix sa = 0.5 * (col.a[r] + col.a[r].transpose());
        Matrix sb = 0.5 * (col.b[r] + col.b[r].transpose());
        col.a[r] = std::move(sa);
        col.b[r] = std::move(sb);
        continue;
      }
      auto& mirror = out.columns[static_cast<std::size_t>(kp)];
      const std::size_t mr = find_block(kp, k);
      Matrix sa = 0.5 * (col.a[r] + mirror.a[mr].transpose());
      Matrix sb = 0.5 * (col.b[r] + mirror.b[mr].transpose());
      mirror.a[mr] = sa.transpose();
      mirror.b[mr] = sb.transpose();
      col.a[r] = std::move(sa);
      col.b[r] = std::move(sb);
    }
  }
  return out;
}

}  // namespace detail

ProjectedPencil assemble_pencil(const SparseHermitian& a, const Partition& p, const LssBasis& basis,
                                AssemblyMode mode) {
  return detail::assemble_pencil(a, p, basis, mode, true);
}

PencilSolution solve_pencil(const Matrix& a_u, const Matrix& b_u, const PencilOptions& options) {
  const Index n = a_u.rows();
  if (a_u.cols() != n || b_u.rows() != n || b_u.cols() != n) {
    throw DimensionError("solve_pencil: A_U and B_U must be square and of equal size");
  }
  PencilSolution out;
  if (n == 0) {
    out.theta.resize(0);
    out.c.resize(0, 0);
    return out;
  }
  Matrix q = b_u;
  Vector lam;
  symmetric_eig(q, lam);
  out.b_min = lam(0);
  out.b_max = lam(n - 1);
  if (!(out.b_max > 0)) throw InputError("solve_pencil: B_U has no positive eigenvalue");
  if (out.b_min < -options.indefinite_tol * out.b_max) {
    throw InputError("solve_pencil: B_U is indefinite, lambda_min = " + std::to_string(out.b_min) +
                     " (lambda_max = " + std::to_string(out.b_max) + ")");
  }
  out.condition = out.b_min > 0 ? out.b_max / out.b_min : std::numeric_limits<double>::infinity();
  const double cut = options.eps_b * out.b_max;
  Index first = 0;
  while (first < n && !(lam(first) > cut)) ++first;
  out.dropped = first;
  out.retained = n - first;
  Matrix pmat(n, out.retained);
  for (Index j = 0; j < out.retained; ++j) pmat.col(j) = q.col(first + j) / std::sqrt(lam(first + j));
  Matrix t = pmat.transpose() * a_u * pmat;
  t = 0.5 * (t + t.transpose()).eval();
  Vector theta;
  symmetric_eig(t, theta);
  out.theta = theta;
  out.c = pmat * t;
  return out;
}

PencilSolution solve_pencil(const ProjectedPencil& pencil, const PencilOptions& options) {
  return solve_pencil(pencil.dense_a(), pencil.dense_b(), options);
}

std::vector<Index> select_window(const Vector& theta, double lo, double hi) {
  std::vector<Index> out;
  for (Index j = 0; j < theta.size(); ++j) {
    if (theta(j) > lo && theta(j) < hi) out.push_back(j);
  }
  return out;
}

namespace detail {

std::vector<double> residual_norms_local(const ProjectedPencil& pencil, const LssBasis& basis, const Partition& p,
                                         const Matrix& c, const Vector& theta, bool parallel) {
  check_basis(p, basis);
  if (c.rows() != basis.n_b || c.cols() != theta.size()) throw DimensionError("residual_norms_local: shape mismatch");
  if (static_cast<Index>(pencil.z.size()) != p.element_count() ||
      static_cast<Index>(pencil.z_rows.size()) != p.element_count()) {
    throw DimensionError("residual_norms_local: Z blocks missing");
  }
  const Index cols = c.cols();
  std::vector<double> out(static_cast<std::size_t>(cols), 0.0);
#pragma omp parallel for schedule(static) if (parallel)
  for (Index j = 0; j < cols; ++j) {
    Vector r = Vector::Zero(p.n);
    for (std::size_t k = 0; k < basis.elements.size(); ++k) {
      const auto& el = basis.elements[k];
      if (el.t == 0) continue;
      const Vector ck = c.col(j).segment(basis.offsets[k], el.t);
      const Vector zc = pencil.z[k] * ck;
      const Vector uc = el.u * ck;
      const auto& zr = pencil.z_rows[k];
      const auto& q = p.extended[k];
      for (Index i = 0; i < zr.size(); ++i) r(zr[i]) += zc(i);
      for (Index i = 0; i < q.size(); ++i) r(q[i]) -= theta(j) * uc(i);
    }
    out[static_cast<std::size_t>(j)] = r.norm();
  }
  return out;
}

}  // namespace detail

std::vector<double> residual_norms_local(const ProjectedPencil& pencil, const LssBasis& basis,
                                         const Partition& p, const Matrix& c, const Vector& theta) {
  return detail::residual_norms_local(pencil, basis, p, c, theta, true);
}

Matrix expand_coefficients(const LssBasis& basis, const Partition& p, const Matrix& c) {
  check_basis(p, basis);
  if (c.rows() != basis.n_b) throw DimensionError("expand_coefficients: C has wrong row count");
  Matrix x = Matrix::Zero(p.n, c.cols());
  for (std::size_t k = 0; k < basis.elements.size(); ++k) {
    const auto& el = basis.elements[k];
    if (el.t == 0) continue;
    const Matrix loc = el.u * c.middleRows(basis.offsets[k], el.t);
    const auto& q = p.extended[k];
    for (Index j = 0; j < c.cols(); ++j) {
      for (Index i = 0; i < q.size(); ++i) x(q[i], j) += loc(i, j);
    }
  }
  return x;
}

namespace detail {

std::vector<double> residual_norms_global(const SparseHermitian& a, const LssBasis& basis, const Partition& p,
                                          const Matrix& c, const Vector& theta, bool parallel) {
  if (c.cols() != theta.size()) throw DimensionError("residual_norms_global: shape mismatch");
  const Matrix x = expand_coefficients(basis, p, c);
  const Matrix ax = parallel ? spmm(a, x) : serial::spmm(a, x);
  std::vector<double> out(static_cast<std::size_t>(c.cols()));
#pragma omp parallel for schedule(static) if (parallel)
  for (Index j = 0; j < c.cols(); ++j) {
    out[static_cast<std::size_t>(j)] = (ax.col(j) - theta(j) * x.col(j)).norm();
  }
  return out;
}

}  // namespace detail

std::vector<double> residual_norms_global(const SparseHermitian& a, const LssBasis& basis, const Partition& p,
                                          const Matrix& c, const Vector& theta) {
  return detail::residual_norms_global(a, basis, p, c, theta, true);
}

double spurious_threshold(const std::vector<double>& residuals, double eta_abs, double eta_rel) {
  if (residuals.empty()) return eta_abs;
  std::vector<double> s = residuals;
  std::sort(s.begin(), s.end());
  const std::size_t h = s.size() / 2;
  const double median = s.size() % 2 ? s[h] : 0.5 * (s[h - 1] + s[h]);
  return std::max(eta_abs, eta_rel * median);
}

std::vector<bool> filter_spurious(const std::vector<double>& residuals, double eta_abs, double eta_rel) {
  const double thr = spurious_threshold(residuals, eta_abs, eta_rel);
  std::vector<bool> flags(residuals.size());
  for (std::size_t j = 0; j < residuals.size(); ++j) flags[j] = residuals[j] > thr;
  return flags;
}

Matrix reconstruct_eigenvectors(const LssBasis& basis, const Partition& p, const Matrix& c) {
  Matrix x = expand_coefficients(basis, p, c);
  for (Index j = 0; j < x.cols(); ++j) {
    const double nrm = x.col(j).norm();
    if (nrm == 0) continue;
    x.col(j) /= nrm;
    const double cmax = x.col(j).cwiseAbs().maxCoeff();
    for (Index i = 0; i < x.rows(); ++i) {
      if (std::abs(x(i, j)) > 1e-8 * cmax) {
        if (x(i, j) < 0) x.col(j) *= -1.0;
        break;
      }
    }
  }
  return x;
}

}  // namespace lss
