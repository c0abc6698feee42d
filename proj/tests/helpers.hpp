#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "lss/model.hpp"
#include "lss/sparse.hpp"

namespace lss::test {

// tridiag(-1, 2, -1), optionally with the periodic corner entries.
inline SparseHermitian laplacian_1d(Index n, bool periodic) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i, 2.0});
    if (i + 1 < n) {
      t.push_back({i, i + 1, -1.0});
      t.push_back({i + 1, i, -1.0});
    }
  }
  if (periodic && n > 2) {
    t.push_back({0, n - 1, -1.0});
    t.push_back({n - 1, 0, -1.0});
  }
  return SparseHermitian::from_triplets(n, t);
}

// Symmetric with an off-diagonal density close to `density` and a random diagonal.
inline SparseHermitian random_sparse(Index n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    t.push_back({i, i, u(rng)});
    for (Index j = i + 1; j < n; ++j) {
      if (p(rng) < density) {
        const double v = u(rng);
        t.push_back({i, j, v});
        t.push_back({j, i, v});
      }
    }
  }
  return SparseHermitian::from_triplets(n, t);
}

inline std::vector<Index> random_permutation(Index n, std::uint64_t seed) {
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

inline ModelSpec1D model_1d(int n_wells = 8, std::uint64_t seed = 0) {
  ModelSpec1D s;
  s.n_wells = n_wells;
  s.h = 0.1;
  s.seed = seed;
  return s;
}

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  }
  return m;
}

}  // namespace lss::test
