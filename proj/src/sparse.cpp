#include "lss/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "lss/error.hpp"

namespace lss {

namespace {

struct Entry {
  Index row;
  Index col;
  double value;
};

bool entry_less(const Entry& a, const Entry& b) {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}

// Sort by (row, col) and sum duplicates.
std::vector<Entry> coalesce(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), entry_less);
  std::vector<Entry> out;
  out.reserve(entries.size());
  for (const Entry& e : entries) {
    if (!out.empty() && out.back().row == e.row && out.back().col == e.col) {
      out.back().value += e.value;
    } else {
      out.push_back(e);
    }
  }
  return out;
}

double lookup(const std::vector<Entry>& sorted, Index row, Index col) {
  Entry key{row, col, 0.0};
  auto it = std::lower_bound(sorted.begin(), sorted.end(), key, entry_less);
  if (it != sorted.end() && it->row == row && it->col == col) return it->value;
  return 0.0;
}

}  // namespace

SparseHermitian SparseHermitian::from_triplets(Index n, std::span<const Triplet> triplets,
                                               bool symmetric_storage) {
  if (n < 0) throw InputError("SparseHermitian: negative dimension");
  std::vector<Entry> entries;
  entries.reserve(triplets.size() * (symmetric_storage ? 2 : 1));
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
      throw InputError("SparseHermitian: entry (" + std::to_string(t.row) + ", " +
                       std::to_string(t.col) + ") out of range for n=" + std::to_string(n));
    }
    entries.push_back({t.row, t.col, t.value});
    if (symmetric_storage && t.row != t.col) entries.push_back({t.col, t.row, t.value});
  }
  std::vector<Entry> merged = coalesce(std::move(entries));

  double asym = 0.0;
  std::vector<Entry> halves;
  halves.reserve(merged.size() * 2);
  for (const Entry& e : merged) {
    if (e.row != e.col) {
      const double mirror = lookup(merged, e.col, e.row);
      const double scale = std::max(std::abs(e.value), std::abs(mirror));
      if (scale > 0.0) asym = std::max(asym, std::abs(e.value - mirror) / scale);
    }
    halves.push_back({e.row, e.col, 0.5 * e.value});
    halves.push_back({e.col, e.row, 0.5 * e.value});
  }
  std::vector<Entry> sym = coalesce(std::move(halves));

  SparseHermitian a;
  a.n_ = n;
  a.max_asymmetry_ = asym;
  a.symmetric_storage_ = symmetric_storage;
  a.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  a.col_idx_.reserve(sym.size());
  a.values_.reserve(sym.size());
  for (const Entry& e : sym) {
    if (e.value == 0.0) continue;
    a.col_idx_.push_back(e.col);
    a.values_.push_back(e.value);
    ++a.row_ptr_[static_cast<std::size_t>(e.row) + 1];
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) a.row_ptr_[i + 1] += a.row_ptr_[i];
  return a;
}

SparseHermitian SparseHermitian::from_dense(const Matrix& dense, double drop_tol) {
  if (dense.rows() != dense.cols()) throw DimensionError("from_dense: matrix not square");
  std::vector<Triplet> t;
  for (Index j = 0; j < dense.cols(); ++j) {
    for (Index i = 0; i < dense.rows(); ++i) {
      if (std::abs(dense(i, j)) > drop_tol) t.push_back({i, j, dense(i, j)});
    }
  }
  return from_triplets(dense.rows(), t);
}

double SparseHermitian::coeff(Index i, Index j) const {
  auto cols = row_cols(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(row_ptr_[i] + (it - cols.begin()))];
}

double SparseHermitian::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Matrix SparseHermitian::to_dense() const {
  Matrix d = Matrix::Zero(n_, n_);
  for (Index i = 0; i < n_; ++i) {
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_idx_[k]) = values_[k];
  }
  return d;
}

SparseHermitian SparseHermitian::permuted(std::span<const Index> perm) const {
  if (static_cast<Index>(perm.size()) != n_) throw DimensionError("permuted: wrong permutation length");
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (Index i = 0; i < n_; ++i) {
    for (Index k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      t.push_back({perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(col_idx_[k])],
                   values_[k]});
    }
  }
  SparseHermitian p = from_triplets(n_, t);
  p.max_asymmetry_ = max_asymmetry_;
  p.symmetric_storage_ = symmetric_storage_;
  return p;
}

DistanceMap geodesic_distances(const SparseHermitian& a, const IndexSet& sources,
                               std::uint32_t cutoff) {
  if (sources.empty()) throw InputError("geodesic_distances: empty source set");
  sources.check_bounds(a.size());
  DistanceMap dm;
  dm.sources = sources;
  dm.distance.assign(static_cast<std::size_t>(a.size()), DistanceMap::kUnreachable);
  std::vector<Index> frontier(sources.begin(), sources.end());
  for (Index s : frontier) dm.distance[static_cast<std::size_t>(s)] = 0;
  std::vector<Index> next;
  std::uint32_t level = 0;
  while (!frontier.empty() && level < cutoff) {
    next.clear();
    for (Index u : frontier) {
      for (Index v : a.row_cols(u)) {
        auto& dv = dm.distance[static_cast<std::size_t>(v)];
        if (dv == DistanceMap::kUnreachable) {
          dv = level + 1;
          next.push_back(v);
        }
      }
    }
    frontier.swap(next);
    ++level;
  }
  return dm;
}

SparseHermitian extract_submatrix(const SparseHermitian& a, const IndexSet& q) {
  q.check_bounds(a.size());
  std::vector<Triplet> t;
  for (Index li = 0; li < q.size(); ++li) {
    const Index i = q[li];
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    // Walk the sorted row and the sorted set together.
    std::size_t k = 0;
    Index lj = 0;
    while (k < cols.size() && lj < q.size()) {
      if (cols[k] < q[lj]) {
        ++k;
      } else if (q[lj] < cols[k]) {
        ++lj;
      } else {
        t.push_back({li, lj, vals[k]});
        ++k;
        ++lj;
      }
    }
  }
  return SparseHermitian::from_triplets(q.size(), t);
}

Matrix spmm(const SparseHermitian& a, const Matrix& b) {
  if (b.rows() != a.size()) {
    throw DimensionError("spmm: A is " + std::to_string(a.size()) + "x" + std::to_string(a.size()) +
                         " but B has " + std::to_string(b.rows()) + " rows");
  }
  Matrix out(a.size(), b.cols());
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto va = a.values();
  const Index n = a.size();
  const Index nc = b.cols();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < nc; ++c) {
      double s = 0.0;
      for (Index k = rp[i]; k < rp[i + 1]; ++k) s += va[k] * b(ci[k], c);
      out(i, c) = s;
    }
  }
  return out;
}

Vector spmv(const SparseHermitian& a, const Vector& x) {
  Matrix y = spmm(a, x);
  return y.col(0);
}

SpectralInterval gershgorin_interval(const SparseHermitian& a) {
  if (a.size() == 0) return {};
  SpectralInterval iv{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (Index i = 0; i < a.size(); ++i) {
    double diag = 0.0;
    double radius = 0.0;
    auto cols = a.row_cols(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] == i) {
        diag = vals[k];
      } else {
        radius += std::abs(vals[k]);
      }
    }
    iv.lo = std::min(iv.lo, diag - radius);
    iv.hi = std::max(iv.hi, diag + radius);
  }
  return iv;
}

namespace {

// Extremal Ritz values of a Lanczos run with full reorthogonalization.
std::pair<double, double> lanczos_extremes(const SparseHermitian& a, int iters) {
  const Index n = a.size();
  const Index steps = std::min<Index>(iters, n);
  std::mt19937_64 gen(0x5eedULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Matrix q(n, steps + 1);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = unif(gen);
  q.col(0) = v.normalized();
  std::vector<double> alpha;
  std::vector<double> beta;
  Index k = 0;
  for (; k < steps; ++k) {
    Vector w = spmv(a, q.col(k));
    const double al = q.col(k).dot(w);
    alpha.push_back(al);
    for (int pass = 0; pass < 2; ++pass) {
      w -= q.leftCols(k + 1) * (q.leftCols(k + 1).transpose() * w);
    }
    const double b = w.norm();
    if (k + 1 == steps || b <= 1e-14 * std::max(1.0, std::abs(al))) {
      ++k;
      break;
    }
    beta.push_back(b);
    q.col(k + 1) = w / b;
  }
  const Index m = static_cast<Index>(alpha.size());
  Vector diag = Eigen::Map<Vector>(alpha.data(), m);
  Vector sub = Vector::Zero(std::max<Index>(m - 1, 0));
  for (Index i = 0; i + 1 < m; ++i) sub(i) = beta[static_cast<std::size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

}  // namespace

SpectralInterval spectral_interval(const SparseHermitian& a, const SpectralIntervalOptions& options) {
  SpectralInterval g = gershgorin_interval(a);
  if (!options.lanczos || a.size() == 0) return g;
  if (options.iters < 1) throw InputError("spectral_interval: iters must be >= 1");
  auto [lo, hi] = lanczos_extremes(a, options.iters);
  const double pad = options.inflate * std::max(hi - lo, std::abs(hi) + std::abs(lo));
  return {std::max(g.lo, lo - pad), std::min(g.hi, hi + pad)};
}

}  // namespace lss
