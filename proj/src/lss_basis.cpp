#include "lss/lss_basis.hpp"

#include <lapacke.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include "lss/error.hpp"
#include "lss/serial.hpp"

namespace lss {

void SliceParams::validate() const {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw InputError("sigma must be positive and finite");
  if (!std::isfinite(mu)) throw InputError("mu must be finite");
  if (!(tau >= 0 && tau < 1)) throw InputError("tau must lie in [0, 1)");
  if (!(c_window >= 1)) throw InputError("c_window must be >= 1");
  if (dense_limit < 0) throw InputError("dense_limit must be >= 0");
  if (iter_block < 1) throw InputError("iter_block must be >= 1");
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::SparseMatrix<double> to_eigen(const SparseHermitian& a, double shift) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(a.nnz() + a.size()));
  for (Index i = 0; i < a.size(); ++i) {
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) t.emplace_back(i, cols[k], vals[k]);
    if (shift != 0) t.emplace_back(i, i, -shift);
  }
  Eigen::SparseMatrix<double> m(a.size(), a.size());
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

Matrix random_block(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix x(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) x(i, j) = nd(rng);
  }
  return x;
}

Matrix orthonormalize(const Matrix& y) {
  Eigen::HouseholderQR<Matrix> qr(y);
  return qr.householderQ() * Matrix::Identity(y.rows(), y.cols());
}

}  // namespace

LocalEig local_partial_eig_dense(const Matrix& a_local, double lo, double hi) {
  const Index n = a_local.rows();
  if (a_local.cols() != n) throw DimensionError("local_partial_eig_dense: matrix is not square");
  LocalEig out;
  if (n == 0 || !(hi > lo)) {
    out.values.resize(0);
    out.vectors.resize(n, 0);
    return out;
  }
  Matrix a = a_local;
  Vector w(n);
  Matrix z(n, n);
  std::vector<lapack_int> isuppz(static_cast<std::size_t>(2 * n));
  lapack_int found = 0;
  const lapack_int ln = static_cast<lapack_int>(n);
  lapack_int info = 0;
  if (std::isfinite(lo) && std::isfinite(hi)) {
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'V', 'U', ln, a.data(), ln, lo, hi, 0, 0, 0.0, &found,
                          w.data(), z.data(), ln, isuppz.data());
  } else {
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'U', ln, a.data(), ln, 0.0, 0.0, 0, 0, 0.0, &found,
                          w.data(), z.data(), ln, isuppz.data());
  }
  if (info != 0) throw ConvergenceError("dsyevr failed with info=" + std::to_string(info));
  std::vector<Index> keep;
  for (Index k = 0; k < found; ++k) {
    if (w(k) > lo && w(k) < hi) keep.push_back(k);
  }
  out.values.resize(static_cast<Index>(keep.size()));
  out.vectors.resize(n, static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    out.values(static_cast<Index>(c)) = w(keep[c]);
    out.vectors.col(static_cast<Index>(c)) = z.col(keep[c]);
  }
  return out;
}

LocalEig local_partial_eig_iterative(const SparseHermitian& a_local, const SliceParams& params) {
  const Index n = a_local.size();
  const double lo = params.window_lo();
  const double hi = params.window_hi();
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw InputError("iterative local solver needs a finite eigen-window");
  }
  LocalEig out;
  out.iterative = true;
  if (n == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  const double mu = params.mu;
  const double half = params.c_window * params.sigma;
  const double scale = std::max(1.0, a_local.max_abs());
  const double tol = params.iter_tol * scale;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  double shift = mu;
  for (int attempt = 0; attempt < 4; ++attempt) {
    lu.compute(to_eigen(a_local, shift));
    if (lu.info() == Eigen::Success) break;
    shift = mu + (attempt + 1) * 1e-7 * scale;
  }
  if (lu.info() != Eigen::Success) throw ConvergenceError("shift-invert factorisation failed near mu");

  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(n));
  Index k = std::min(n, params.iter_block);
  auto guard_of = [&](Index kk) { return std::min(n - kk, std::max<Index>(10, kk / 4)); };
  Matrix x = orthonormalize(random_block(n, k + guard_of(k), rng));

  Vector theta;
  Matrix ritz;
  std::vector<double> res;
  for (int sweep = 0; sweep < params.iter_max_sweeps; ++sweep) {
    const Matrix y = lu.solve(x);
    if (lu.info() != Eigen::Success) throw ConvergenceError("shift-invert solve failed");
    const Matrix q = orthonormalize(y);
    const Matrix aq = spmm(a_local, q);
    Matrix h = q.transpose() * aq;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw ConvergenceError("Rayleigh-Ritz eigensolve failed");

    std::vector<Index> order(static_cast<std::size_t>(h.rows()));
    for (Index i = 0; i < h.rows(); ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](Index l, Index r) {
      return std::abs(es.eigenvalues()(l) - mu) < std::abs(es.eigenvalues()(r) - mu);
    });
    const Index p = h.rows();
    theta.resize(p);
    Matrix vecs(p, p);
    for (Index i = 0; i < p; ++i) {
      theta(i) = es.eigenvalues()(order[static_cast<std::size_t>(i)]);
      vecs.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    }
    ritz = q * vecs;
    const Matrix ar = aq * vecs;
    res.assign(static_cast<std::size_t>(k), 0.0);
    bool all = true;
    for (Index i = 0; i < k; ++i) {
      res[static_cast<std::size_t>(i)] = (ar.col(i) - theta(i) * ritz.col(i)).norm();
      if (res[static_cast<std::size_t>(i)] > tol) all = false;
    }
    if (all) {
      const bool bracketed = std::abs(theta(k - 1) - mu) >= half || k == n;
      if (bracketed) {
        std::vector<Index> keep;
        for (Index i = 0; i < k; ++i) {
          if (theta(i) > lo && theta(i) < hi) keep.push_back(i);
        }
        std::sort(keep.begin(), keep.end(), [&](Index l, Index r) { return theta(l) < theta(r); });
        out.values.resize(static_cast<Index>(keep.size()));
        out.vectors.resize(n, static_cast<Index>(keep.size()));
        for (std::size_t c = 0; c < keep.size(); ++c) {
          out.values(static_cast<Index>(c)) = theta(keep[c]);
          out.vectors.col(static_cast<Index>(c)) = ritz.col(keep[c]);
          out.max_residual = std::max(out.max_residual, res[static_cast<std::size_t>(keep[c])]);
        }
        return out;
      }
      k = std::min(n, k + params.iter_block);
      const Index p_new = k + guard_of(k);
      Matrix grown(n, p_new);
      const Index reuse = std::min(p_new, ritz.cols());
      grown.leftCols(reuse) = ritz.leftCols(reuse);
      if (p_new > reuse) grown.rightCols(p_new - reuse) = random_block(n, p_new - reuse, rng);
      x = orthonormalize(grown);
      continue;
    }
    x = ritz;
  }
  const double worst = *std::max_element(res.begin(), res.end());
  std::ostringstream msg;
  msg.precision(3);
  msg << "iterative local eigensolver did not converge after " << params.iter_max_sweeps
      << " sweeps (requested " << k << " pairs nearest mu, worst residual " << std::scientific << worst
      << ", tolerance " << tol << ")";
  throw ConvergenceError(msg.str());
}

LocalEig local_partial_eig(const SparseHermitian& a_local, const SliceParams& params) {
  const bool dense = params.solver == LocalSolver::dense ||
                     (params.solver == LocalSolver::automatic && a_local.size() <= params.dense_limit) ||
                     !std::isfinite(params.c_window);
  if (dense) return local_partial_eig_dense(a_local.to_dense(), params.window_lo(), params.window_hi());
  return local_partial_eig_iterative(a_local, params);
}

Vector gaussian_filter(const Vector& d, double mu, double sigma) {
  if (!(sigma > 0)) throw InputError("gaussian_filter: sigma must be positive");
  Vector f(d.size());
  for (Index i = 0; i < d.size(); ++i) {
    const double z = (d(i) - mu) / sigma;
    f(i) = std::exp(-z * z);
  }
  return f;
}

TruncatedSvd local_svd_truncate(const Matrix& w, double tau) {
  if (!(tau >= 0 && tau < 1)) throw InputError("local_svd_truncate: tau must lie in [0, 1)");
  TruncatedSvd out;
  if (w.rows() == 0 || w.cols() == 0) {
    out.u.resize(w.rows(), 0);
    out.vt.resize(0, w.cols());
    out.singular_values.resize(0);
    return out;
  }
  Eigen::BDCSVD<Matrix> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw ConvergenceError("local SVD did not converge");
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values(0);
  out.tau_abs = tau * smax;
  Index t = 0;
  while (t < out.singular_values.size() && out.singular_values(t) > out.tau_abs && out.singular_values(t) > 0) ++t;
  out.kept = t;
  out.u = svd.matrixU().leftCols(t);
  out.vt = out.singular_values.head(t).asDiagonal() * svd.matrixV().leftCols(t).transpose();
  return out;
}

ElementBasis build_element_basis(const SparseHermitian& a_local, const IndexSet& e, const IndexSet& q,
                                 const SliceParams& params, Index kappa) {
  if (a_local.size() != q.size()) throw DimensionError("build_element_basis: A_k does not match |Q_k|");
  ElementBasis b;
  b.kappa = kappa;
  auto t0 = std::chrono::steady_clock::now();
  LocalEig eig = local_partial_eig(a_local, params);
  b.eig_seconds = seconds_since(t0);
  b.iterative = eig.iterative;
  b.s = eig.values.size();
  b.eigvals = eig.values;

  std::vector<Index> e_pos;
  e_pos.reserve(static_cast<std::size_t>(e.size()));
  for (Index v : e) {
    auto pos = q.position_of(v);
    if (!pos) throw InputError("build_element_basis: E_k is not contained in Q_k");
    e_pos.push_back(*pos);
  }

  t0 = std::chrono::steady_clock::now();
  const Vector f = gaussian_filter(eig.values, params.mu, params.sigma);
  Matrix w;
  if (params.svd_operand == SvdOperand::element) {
    w.resize(b.s, e.size());
    for (Index j = 0; j < e.size(); ++j) {
      for (Index i = 0; i < b.s; ++i) w(i, j) = f(i) * eig.vectors(e_pos[static_cast<std::size_t>(j)], i);
    }
  } else {
    w = f.asDiagonal() * eig.vectors.transpose();
  }
  TruncatedSvd svd = local_svd_truncate(w, params.tau);
  b.t = svd.kept;
  b.tau_abs = svd.tau_abs;
  b.singular_values = svd.singular_values;
  b.u = eig.vectors * svd.u;
  if (params.svd_operand == SvdOperand::element) {
    b.v = std::move(svd.vt);
  } else {
    b.v.resize(b.t, e.size());
    for (Index j = 0; j < e.size(); ++j) b.v.col(j) = svd.vt.col(e_pos[static_cast<std::size_t>(j)]);
  }
  // First significant entry of every U_k column is made positive.
  for (Index c = 0; c < b.t; ++c) {
    const double cmax = b.u.col(c).cwiseAbs().maxCoeff();
    for (Index i = 0; i < b.u.rows(); ++i) {
      if (std::abs(b.u(i, c)) > 1e-8 * cmax) {
        if (b.u(i, c) < 0) {
          b.u.col(c) *= -1.0;
          b.v.row(c) *= -1.0;
        }
        break;
      }
    }
  }
  b.svd_seconds = seconds_since(t0);
  if (params.keep_eigvecs) b.eigvecs = std::move(eig.vectors);
  return b;
}

void finalize_offsets(LssBasis& basis) {
  basis.offsets.assign(basis.elements.size() + 1, 0);
  basis.empty_elements.clear();
  basis.max_tau_abs = 0;
  basis.max_singular_value = 0;
  for (std::size_t k = 0; k < basis.elements.size(); ++k) {
    const auto& el = basis.elements[k];
    basis.offsets[k + 1] = basis.offsets[k] + el.t;
    if (el.t == 0) basis.empty_elements.push_back(static_cast<Index>(k));
    basis.max_tau_abs = std::max(basis.max_tau_abs, el.tau_abs);
    if (el.singular_values.size() > 0) {
      basis.max_singular_value = std::max(basis.max_singular_value, el.singular_values(0));
    }
  }
  basis.n_b = basis.offsets.back();
}

namespace {

enum class Failure { none, input, convergence, other };

}  // namespace

namespace detail {

LssBasis build_lss_basis(const SparseHermitian& a, const Partition& p, const SliceParams& params, bool parallel) {
  params.validate();
  if (p.n != a.size()) throw DimensionError("build_lss_basis: partition does not match matrix size");
  const Index m = p.element_count();
  LssBasis basis;
  basis.elements.resize(static_cast<std::size_t>(m));
  std::vector<Failure> kind(static_cast<std::size_t>(m), Failure::none);
  std::vector<std::string> why(static_cast<std::size_t>(m));

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (Index k = 0; k < m; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    try {
      const SparseHermitian local = extract_submatrix(a, p.extended[ks]);
      basis.elements[ks] = build_element_basis(local, p.elements[ks], p.extended[ks], params, k);
    } catch (const InputError& ex) {
      kind[ks] = Failure::input;
      why[ks] = ex.what();
    } catch (const ConvergenceError& ex) {
      kind[ks] = Failure::convergence;
      why[ks] = ex.what();
    } catch (const std::exception& ex) {
      kind[ks] = Failure::other;
      why[ks] = ex.what();
    }
  }

  std::ostringstream msg;
  Failure worst = Failure::none;
  for (Index k = 0; k < m; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    if (kind[ks] == Failure::none) continue;
    if (worst != Failure::none) msg << "; ";
    msg << "element " << k << ": " << why[ks];
    if (worst == Failure::none || worst == kind[ks]) {
      worst = kind[ks];
    } else {
      worst = Failure::other;
    }
  }
  if (worst == Failure::input) throw InputError("LSS basis construction failed: " + msg.str());
  if (worst == Failure::convergence) throw ConvergenceError("LSS basis construction failed: " + msg.str());
  if (worst == Failure::other) throw Error("LSS basis construction failed: " + msg.str());

  finalize_offsets(basis);
  return basis;
}

}  // namespace detail

LssBasis build_lss_basis(const SparseHermitian& a, const Partition& p, const SliceParams& params) {
  return detail::build_lss_basis(a, p, params, true);
}

Eigen::SparseMatrix<double> assemble_approx_operator(const LssBasis& basis, const Partition& p) {
  if (static_cast<Index>(basis.elements.size()) != p.element_count()) {
    throw DimensionError("assemble_approx_operator: basis and partition disagree on M");
  }
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t k = 0; k < basis.elements.size(); ++k) {
    const auto& el = basis.elements[k];
    const auto& q = p.extended[k];
    const auto& e = p.elements[k];
    if (el.t == 0) continue;
    if (el.u.rows() != q.size() || el.v.cols() != e.size()) {
      throw DimensionError("assemble_approx_operator: element " + std::to_string(k) + " has wrong block shape");
    }
    const Matrix f = el.u * el.v;
    for (Index j = 0; j < e.size(); ++j) {
      for (Index i = 0; i < q.size(); ++i) t.emplace_back(q[i], e[j], f(i, j));
    }
  }
  Eigen::SparseMatrix<double> out(p.n, p.n);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace lss
