#include "lss/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lss/error.hpp"

namespace lss::oracle {

namespace {

// Householder reduction of the symmetric matrix stored in v (column-major,
// overwritten by the accumulated orthogonal transform) to tridiagonal form
// with diagonal d and subdiagonal e (e[0] unused on exit).
void tridiagonalize(Matrix& v, Vector& d, Vector& e, bool accumulate) {
  const Index n = v.rows();
  for (Index j = 0; j < n; ++j) d(j) = v(n - 1, j);

  for (Index i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (Index k = 0; k < i; ++k) scale += std::abs(d(k));
    if (scale == 0.0) {
      e(i) = d(i - 1);
      for (Index j = 0; j < i; ++j) {
        d(j) = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (Index k = 0; k < i; ++k) {
        d(k) /= scale;
        h += d(k) * d(k);
      }
      double f = d(i - 1);
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e(i) = scale * g;
      h -= f * g;
      d(i - 1) = f - g;
      for (Index j = 0; j < i; ++j) e(j) = 0.0;

      for (Index j = 0; j < i; ++j) {
        f = d(j);
        v(j, i) = f;
        g = e(j) + v(j, j) * f;
        double* vcol = &v(0, j);
        for (Index k = j + 1; k <= i - 1; ++k) {
          g += vcol[k] * d(k);
          e(k) += vcol[k] * f;
        }
        e(j) = g;
      }
      f = 0.0;
      for (Index j = 0; j < i; ++j) {
        e(j) /= h;
        f += e(j) * d(j);
      }
      const double hh = f / (h + h);
      for (Index j = 0; j < i; ++j) e(j) -= hh * d(j);
      for (Index j = 0; j < i; ++j) {
        f = d(j);
        g = e(j);
        double* vcol = &v(0, j);
        for (Index k = j; k <= i - 1; ++k) vcol[k] -= (f * e(k) + g * d(k));
        d(j) = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d(i) = h;
  }

  if (accumulate) {
    for (Index i = 0; i < n - 1; ++i) {
      v(n - 1, i) = v(i, i);
      v(i, i) = 1.0;
      const double h = d(i + 1);
      if (h != 0.0) {
        for (Index k = 0; k <= i; ++k) d(k) = v(k, i + 1) / h;
        for (Index j = 0; j <= i; ++j) {
          double g = 0.0;
          for (Index k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
          for (Index k = 0; k <= i; ++k) v(k, j) -= g * d(k);
        }
      }
      for (Index k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (Index j = 0; j < n; ++j) {
      d(j) = v(n - 1, j);
      v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
  } else {
    // Diagonal lives in the Householder workspace.
    for (Index j = 0; j < n; ++j) d(j) = v(j, j);
  }
  e(0) = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e). Rotations are applied to v
// when accumulate is set.
void ql_implicit(Matrix& v, Vector& d, Vector& e, bool accumulate) {
  const Index n = d.size();
  for (Index i = 1; i < n; ++i) e(i - 1) = e(i);
  e(n - 1) = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::ldexp(1.0, -52);
  for (Index l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d(l)) + std::abs(e(l)));
    Index m = l;
    while (m < n) {
      if (std::abs(e(m)) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 60) {
          throw ConvergenceError("dense_eig: QL iteration did not converge at index " +
                                 std::to_string(l));
        }
        double g = d(l);
        double p = (d(l + 1) - g) / (2.0 * e(l));
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d(l) = e(l) / (p + r);
        d(l + 1) = e(l) * (p + r);
        const double dl1 = d(l + 1);
        double h = g - d(l);
        for (Index i = l + 2; i < n; ++i) d(i) -= h;
        f += h;

        p = d(m);
        double c = 1.0;
        double c2 = c;
        double c3 = c;
        const double el1 = e(l + 1);
        double s = 0.0;
        double s2 = 0.0;
        for (Index i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e(i);
          h = c * p;
          r = std::hypot(p, e(i));
          e(i + 1) = s * r;
          s = e(i) / r;
          c = p / r;
          p = c * d(i) - s * g;
          d(i + 1) = h + s * (c * g + s * d(i));
          if (accumulate) {
            double* vi = &v(0, i);
            double* vi1 = &v(0, i + 1);
            for (Index k = 0; k < n; ++k) {
              h = vi1[k];
              vi1[k] = s * vi[k] + c * h;
              vi[k] = c * vi[k] - s * h;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e(l) / dl1;
        e(l) = s * p;
        d(l) = c * p;
      } while (std::abs(e(l)) > eps * tst1);
    }
    d(l) += f;
    e(l) = 0.0;
  }
}

}  // namespace

DenseEig dense_eig(const Matrix& a, bool want_vectors, Index cap) {
  if (a.rows() != a.cols()) throw DimensionError("dense_eig: matrix not square");
  const Index n = a.rows();
  if (n > cap) {
    throw InputError("dense_eig: n=" + std::to_string(n) + " exceeds oracle cap " + std::to_string(cap));
  }
  DenseEig out;
  if (n == 0) return out;
  Matrix v = a;
  Vector d(n);
  Vector e(n);
  tridiagonalize(v, d, e, want_vectors);
  ql_implicit(v, d, e, want_vectors);

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return d(x) < d(y); });
  out.values.resize(n);
  for (Index k = 0; k < n; ++k) out.values(k) = d(order[static_cast<std::size_t>(k)]);
  if (want_vectors) {
    out.vectors.resize(n, n);
    for (Index k = 0; k < n; ++k) out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

Matrix apply_function_gaussian(const DenseEig& eig, double mu, double sigma) {
  if (eig.vectors.size() == 0 && eig.values.size() > 0) {
    throw InputError("apply_function_gaussian: eigenvectors required");
  }
  const Index n = eig.values.size();
  Matrix scaled = eig.vectors;
  for (Index k = 0; k < n; ++k) {
    const double z = (eig.values(k) - mu) / sigma;
    scaled.col(k) *= std::exp(-z * z);
  }
  Matrix f = Matrix::Zero(n, n);
  // Plain triple loop keeps the oracle independent of the BLAS-style kernels.
  for (Index k = 0; k < n; ++k) {
    const auto xk = eig.vectors.col(k);
    const auto sk = scaled.col(k);
    for (Index j = 0; j < n; ++j) {
      const double w = xk(j);
      if (w == 0.0) continue;
      double* fj = &f(0, j);
      const double* s = sk.data();
      for (Index i = 0; i < n; ++i) fj[i] += s[i] * w;
    }
  }
  return f;
}

Matrix exact_lss_operator(const Matrix& a, double mu, double sigma, Index cap) {
  if (!(sigma > 0)) throw InputError("exact_lss_operator: sigma must be positive");
  return apply_function_gaussian(dense_eig(a, true, cap), mu, sigma);
}

double max_norm_error(const Matrix& f, const Matrix& g) {
  if (f.rows() != g.rows() || f.cols() != g.cols()) {
    throw DimensionError("max_norm_error: shape mismatch");
  }
  if (f.size() == 0) return 0.0;
  return (f - g).cwiseAbs().maxCoeff();
}

Vector eigs_in_window(const DenseEig& eig, double lo, double hi) {
  std::vector<double> kept;
  for (Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) > lo && eig.values(k) < hi) kept.push_back(eig.values(k));
  }
  return Eigen::Map<Vector>(kept.data(), static_cast<Index>(kept.size()));
}

Vector eigs_in_window(const Matrix& a, double lo, double hi, Index cap) {
  return eigs_in_window(dense_eig(a, false, cap), lo, hi);
}

RitzComparison compare_ritz(const Vector& reference, const Vector& ritz,
                            std::optional<Vector> all_eigenvalues) {
  RitzComparison c;
  c.reference_count = reference.size();
  c.ritz_count = ritz.size();
  c.count_match = reference.size() == ritz.size();
  std::vector<double> ref(reference.data(), reference.data() + reference.size());
  std::vector<double> rz(ritz.data(), ritz.data() + ritz.size());
  std::sort(ref.begin(), ref.end());
  std::sort(rz.begin(), rz.end());
  if (c.count_match) {
    for (std::size_t k = 0; k < ref.size(); ++k) {
      c.max_pair_error = std::max(c.max_pair_error, std::abs(ref[k] - rz[k]));
    }
  }
  std::vector<double> pool;
  if (all_eigenvalues) {
    pool.assign(all_eigenvalues->data(), all_eigenvalues->data() + all_eigenvalues->size());
    std::sort(pool.begin(), pool.end());
  } else {
    pool = ref;
  }
  if (!pool.empty()) {
    for (double t : rz) {
      auto it = std::lower_bound(pool.begin(), pool.end(), t);
      double best = std::numeric_limits<double>::infinity();
      if (it != pool.end()) best = std::min(best, std::abs(*it - t));
      if (it != pool.begin()) best = std::min(best, std::abs(*std::prev(it) - t));
      c.max_nearest_error = std::max(c.max_nearest_error, best);
    }
  }
  return c;
}

}  // namespace lss::oracle
