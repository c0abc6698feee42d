#include "lss/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lss/error.hpp"

namespace lss {

double Partition::c_q() const {
  if (elements.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < elements.size(); ++k) {
    s += static_cast<double>(extended[k].size()) / static_cast<double>(elements[k].size());
  }
  return s / static_cast<double>(elements.size());
}

void Partition::validate() const {
  const Index m = element_count();
  if (m < 1) throw InputError("Partition: no elements");
  if (static_cast<Index>(xi.size()) != n || static_cast<Index>(neighbors.size()) != m ||
      static_cast<Index>(extended.size()) != m) {
    throw InputError("Partition: inconsistent array sizes");
  }
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  for (Index k = 0; k < m; ++k) {
    const auto& e = elements[static_cast<std::size_t>(k)];
    if (e.empty()) throw InputError("Partition: element " + std::to_string(k) + " is empty");
    e.check_bounds(n);
    for (Index v : e) {
      if (seen[static_cast<std::size_t>(v)]++) {
        throw InputError("Partition: vertex " + std::to_string(v) + " in more than one element");
      }
      if (xi[static_cast<std::size_t>(v)] != k) throw InputError("Partition: xi disagrees with elements");
    }
    if (!neighbors[static_cast<std::size_t>(k)].contains(k)) {
      throw InputError("Partition: element " + std::to_string(k) + " missing from its neighbor list");
    }
    neighbors[static_cast<std::size_t>(k)].check_bounds(m);
    extended[static_cast<std::size_t>(k)].check_bounds(n);
    if (!e.is_subset_of(extended[static_cast<std::size_t>(k)])) {
      throw InputError("Partition: E_" + std::to_string(k) + " not contained in Q_" + std::to_string(k));
    }
  }
  for (Index v = 0; v < n; ++v) {
    if (!seen[static_cast<std::size_t>(v)]) {
      throw InputError("Partition: vertex " + std::to_string(v) + " not covered");
    }
  }
}

namespace {

Partition from_elements(Index n, std::vector<IndexSet> elements) {
  Partition p;
  p.n = n;
  p.xi.assign(static_cast<std::size_t>(n), -1);
  for (std::size_t k = 0; k < elements.size(); ++k) {
    for (Index v : elements[k]) p.xi[static_cast<std::size_t>(v)] = static_cast<Index>(k);
  }
  p.elements = std::move(elements);
  return p;
}

IndexSet union_of(const std::vector<IndexSet>& elements, const IndexSet& ids) {
  std::vector<Index> all;
  for (Index k : ids) {
    const auto& e = elements[static_cast<std::size_t>(k)];
    all.insert(all.end(), e.begin(), e.end());
  }
  return IndexSet::from_unsorted(std::move(all));
}

Index wrap(Index k, Index m) { return ((k % m) + m) % m; }

}  // namespace

Partition partition_structured_1d(Index n, Index m) {
  if (m < 1 || n < 1 || n % m != 0) {
    throw InputError("partition_structured_1d: M=" + std::to_string(m) + " must divide n=" + std::to_string(n));
  }
  const Index w = n / m;
  std::vector<IndexSet> elements;
  for (Index k = 0; k < m; ++k) elements.push_back(IndexSet::range(k * w, (k + 1) * w));
  Partition p = from_elements(n, std::move(elements));
  for (Index k = 0; k < m; ++k) {
    IndexSet nb = IndexSet::from_unsorted({wrap(k - 1, m), k, wrap(k + 1, m)});
    p.extended.push_back(union_of(p.elements, nb));
    p.neighbors.push_back(std::move(nb));
  }
  return p;
}

Partition partition_structured_2d(Index nx, Index ny, Index m) {
  const auto s = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(m))));
  if (m < 1 || s * s != m) throw InputError("partition_structured_2d: M=" + std::to_string(m) + " is not a square");
  if (nx % s != 0 || ny % s != 0) {
    throw InputError("partition_structured_2d: sqrt(M)=" + std::to_string(s) + " must divide nx and ny");
  }
  const Index bx = nx / s;
  const Index by = ny / s;
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(m));
  for (Index iy = 0; iy < ny; ++iy) {
    for (Index ix = 0; ix < nx; ++ix) {
      const Index k = (iy / by) * s + (ix / bx);
      members[static_cast<std::size_t>(k)].push_back(iy * nx + ix);
    }
  }
  std::vector<IndexSet> elements;
  for (auto& mem : members) elements.push_back(IndexSet(std::move(mem)));
  Partition p = from_elements(nx * ny, std::move(elements));
  for (Index ty = 0; ty < s; ++ty) {
    for (Index tx = 0; tx < s; ++tx) {
      std::vector<Index> ids;
      for (Index dy = -1; dy <= 1; ++dy) {
        for (Index dx = -1; dx <= 1; ++dx) ids.push_back(wrap(ty + dy, s) * s + wrap(tx + dx, s));
      }
      IndexSet nb = IndexSet::from_unsorted(std::move(ids));
      p.extended.push_back(union_of(p.elements, nb));
      p.neighbors.push_back(std::move(nb));
    }
  }
  return p;
}

Index edge_cut(const SparseHermitian& a, std::span<const Index> xi) {
  Index cut = 0;
  for (Index i = 0; i < a.size(); ++i) {
    for (Index j : a.row_cols(i)) {
      if (j > i && xi[static_cast<std::size_t>(i)] != xi[static_cast<std::size_t>(j)]) ++cut;
    }
  }
  return cut;
}

Partition partition_from_map(const SparseHermitian& a, std::span<const Index> xi) {
  const Index n = a.size();
  if (static_cast<Index>(xi.size()) != n) {
    throw InputError("partition map has " + std::to_string(xi.size()) + " entries, matrix has " +
                     std::to_string(n) + " vertices");
  }
  Index m = 0;
  for (Index v : xi) {
    if (v < 0) throw InputError("partition map: negative element id");
    m = std::max(m, v + 1);
  }
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(m));
  for (Index v = 0; v < n; ++v) members[static_cast<std::size_t>(xi[static_cast<std::size_t>(v)])].push_back(v);
  std::vector<IndexSet> elements;
  for (Index k = 0; k < m; ++k) {
    if (members[static_cast<std::size_t>(k)].empty()) {
      throw InputError("partition map: element " + std::to_string(k) + " is empty");
    }
    elements.push_back(IndexSet(std::move(members[static_cast<std::size_t>(k)])));
  }
  Partition p = from_elements(n, std::move(elements));

  std::vector<std::vector<Index>> nb(static_cast<std::size_t>(m));
  for (Index k = 0; k < m; ++k) nb[static_cast<std::size_t>(k)].push_back(k);
  for (Index i = 0; i < n; ++i) {
    const Index ki = xi[static_cast<std::size_t>(i)];
    for (Index j : a.row_cols(i)) {
      const Index kj = xi[static_cast<std::size_t>(j)];
      if (ki != kj) nb[static_cast<std::size_t>(kj)].push_back(ki);
    }
  }
  for (Index k = 0; k < m; ++k) {
    IndexSet ids = IndexSet::from_unsorted(std::move(nb[static_cast<std::size_t>(k)]));
    p.extended.push_back(union_of(p.elements, ids));
    p.neighbors.push_back(std::move(ids));
  }
  return p;
}

Partition partition_general(const SparseHermitian& a, Index m, const GraphPartitionOptions& options) {
  if (m < 1) throw InputError("partition_general: M must be >= 1");
  if (m > a.size()) {
    throw InputError("partition_general: M=" + std::to_string(m) + " exceeds n=" + std::to_string(a.size()));
  }
  const auto xi = graph_partition(a, m, options);
  return partition_from_map(a, xi);
}

std::vector<IndexSet> extended_elements_mhop(const SparseHermitian& a, std::span<const IndexSet> elements,
                                             std::uint32_t m) {
  std::vector<IndexSet> out;
  out.reserve(elements.size());
  for (const auto& e : elements) {
    if (e.empty()) {
      out.emplace_back();
      continue;
    }
    const DistanceMap d = geodesic_distances(a, e, m);
    std::vector<Index> ball;
    for (Index v = 0; v < a.size(); ++v) {
      if (d.reachable(v)) ball.push_back(v);
    }
    out.emplace_back(std::move(ball));
  }
  return out;
}

Partition with_mhop_extension(const SparseHermitian& a, const Partition& p, std::uint32_t m) {
  Partition q = p;
  q.extended = extended_elements_mhop(a, p.elements, m);
  q.hops = static_cast<int>(std::min<std::uint32_t>(m, static_cast<std::uint32_t>(std::numeric_limits<int>::max())));
  q.neighbors.clear();
  for (const auto& ext : q.extended) {
    std::vector<Index> ids;
    for (Index v : ext) ids.push_back(p.xi[static_cast<std::size_t>(v)]);
    q.neighbors.push_back(IndexSet::from_unsorted(std::move(ids)));
  }
  return q;
}

std::optional<Index> effective_hops(const SparseHermitian& a, const Partition& p) {
  std::optional<Index> best;
  for (Index k = 0; k < p.element_count(); ++k) {
    const auto& q = p.extended[static_cast<std::size_t>(k)];
    if (q.size() == a.size()) continue;
    std::vector<Index> outside;
    outside.reserve(static_cast<std::size_t>(a.size() - q.size()));
    for (Index v = 0; v < a.size(); ++v) {
      if (!q.contains(v)) outside.push_back(v);
    }
    const DistanceMap d = geodesic_distances(a, IndexSet(std::move(outside)));
    std::uint32_t closest = DistanceMap::kUnreachable;
    for (Index v : p.elements[static_cast<std::size_t>(k)]) closest = std::min(closest, d[v]);
    if (closest == DistanceMap::kUnreachable) continue;
    const Index r = static_cast<Index>(closest) - 1;
    best = best ? std::min(*best, r) : r;
  }
  return best;
}

Partition permuted(const Partition& p, std::span<const Index> perm) {
  if (static_cast<Index>(perm.size()) != p.n) throw DimensionError("permuted(Partition): wrong length");
  auto map_set = [&](const IndexSet& s) {
    std::vector<Index> v;
    v.reserve(static_cast<std::size_t>(s.size()));
    for (Index x : s) v.push_back(perm[static_cast<std::size_t>(x)]);
    return IndexSet::from_unsorted(std::move(v));
  };
  Partition q;
  q.n = p.n;
  q.hops = p.hops;
  q.neighbors = p.neighbors;
  q.xi.assign(static_cast<std::size_t>(p.n), -1);
  for (Index v = 0; v < p.n; ++v) q.xi[static_cast<std::size_t>(perm[static_cast<std::size_t>(v)])] = p.xi[static_cast<std::size_t>(v)];
  for (const auto& e : p.elements) q.elements.push_back(map_set(e));
  for (const auto& e : p.extended) q.extended.push_back(map_set(e));
  return q;
}

}  // namespace lss
