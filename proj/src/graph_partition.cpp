#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lss/error.hpp"
#include "lss/partition.hpp"

namespace lss {

namespace {

using W = std::int64_t;

struct Graph {
  Index n = 0;
  std::vector<Index> xadj{0};
  std::vector<Index> adj;
  std::vector<W> ew;
  std::vector<W> vw;

  W total_weight() const {
    W s = 0;
    for (W w : vw) s += w;
    return s;
  }
};

Graph from_matrix(const SparseHermitian& a) {
  Graph g;
  g.n = a.size();
  g.vw.assign(static_cast<std::size_t>(g.n), 1);
  g.xadj.reserve(static_cast<std::size_t>(g.n) + 1);
  for (Index i = 0; i < g.n; ++i) {
    for (Index j : a.row_cols(i)) {
      if (j == i) continue;
      g.adj.push_back(j);
      g.ew.push_back(1);
    }
    g.xadj.push_back(static_cast<Index>(g.adj.size()));
  }
  return g;
}

// Induced subgraph on `verts` (sorted local ids of g).
Graph induced(const Graph& g, const std::vector<Index>& verts) {
  std::vector<Index> local(static_cast<std::size_t>(g.n), -1);
  for (std::size_t k = 0; k < verts.size(); ++k) local[static_cast<std::size_t>(verts[k])] = static_cast<Index>(k);
  Graph s;
  s.n = static_cast<Index>(verts.size());
  for (Index v : verts) {
    s.vw.push_back(g.vw[static_cast<std::size_t>(v)]);
    for (Index e = g.xadj[static_cast<std::size_t>(v)]; e < g.xadj[static_cast<std::size_t>(v) + 1]; ++e) {
      const Index u = local[static_cast<std::size_t>(g.adj[static_cast<std::size_t>(e)])];
      if (u < 0) continue;
      s.adj.push_back(u);
      s.ew.push_back(g.ew[static_cast<std::size_t>(e)]);
    }
    s.xadj.push_back(static_cast<Index>(s.adj.size()));
  }
  return s;
}

// Heavy-edge matching in a seeded random visit order. Returns the coarse
// graph and fills cmap (fine vertex -> coarse vertex).
Graph coarsen(const Graph& g, std::mt19937_64& rng, std::vector<Index>& cmap) {
  std::vector<Index> order(static_cast<std::size_t>(g.n));
  for (Index i = 0; i < g.n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (Index i = g.n - 1; i > 0; --i) {
    const auto j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  std::vector<Index> match(static_cast<std::size_t>(g.n), -1);
  for (Index v : order) {
    if (match[static_cast<std::size_t>(v)] >= 0) continue;
    Index best = v;
    W best_w = -1;
    for (Index e = g.xadj[static_cast<std::size_t>(v)]; e < g.xadj[static_cast<std::size_t>(v) + 1]; ++e) {
      const Index u = g.adj[static_cast<std::size_t>(e)];
      if (u == v || match[static_cast<std::size_t>(u)] >= 0) continue;
      const W w = g.ew[static_cast<std::size_t>(e)];
      if (w > best_w || (w == best_w && u < best)) {
        best = u;
        best_w = w;
      }
    }
    match[static_cast<std::size_t>(v)] = best;
    match[static_cast<std::size_t>(best)] = v;
  }
  cmap.assign(static_cast<std::size_t>(g.n), -1);
  Index nc = 0;
  for (Index v = 0; v < g.n; ++v) {
    if (cmap[static_cast<std::size_t>(v)] >= 0) continue;
    cmap[static_cast<std::size_t>(v)] = nc;
    cmap[static_cast<std::size_t>(match[static_cast<std::size_t>(v)])] = nc;
    ++nc;
  }
  Graph c;
  c.n = nc;
  c.vw.assign(static_cast<std::size_t>(nc), 0);
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(nc));
  for (Index v = 0; v < g.n; ++v) {
    c.vw[static_cast<std::size_t>(cmap[static_cast<std::size_t>(v)])] += g.vw[static_cast<std::size_t>(v)];
    members[static_cast<std::size_t>(cmap[static_cast<std::size_t>(v)])].push_back(v);
  }
  std::vector<Index> slot(static_cast<std::size_t>(nc), -1);
  for (Index cv = 0; cv < nc; ++cv) {
    const auto start = static_cast<Index>(c.adj.size());
    for (Index v : members[static_cast<std::size_t>(cv)]) {
      for (Index e = g.xadj[static_cast<std::size_t>(v)]; e < g.xadj[static_cast<std::size_t>(v) + 1]; ++e) {
        const Index cu = cmap[static_cast<std::size_t>(g.adj[static_cast<std::size_t>(e)])];
        if (cu == cv) continue;
        Index& s = slot[static_cast<std::size_t>(cu)];
        if (s < start) {
          s = static_cast<Index>(c.adj.size());
          c.adj.push_back(cu);
          c.ew.push_back(0);
        }
        c.ew[static_cast<std::size_t>(s)] += g.ew[static_cast<std::size_t>(e)];
      }
    }
    c.xadj.push_back(static_cast<Index>(c.adj.size()));
  }
  return c;
}

struct Bisector {
  const Graph& g;
  W max_w[2];

  W cut(const std::vector<int>& side) const {
    W c = 0;
    for (Index v = 0; v < g.n; ++v) {
      for (Index e = g.xadj[static_cast<std::size_t>(v)]; e < g.xadj[static_cast<std::size_t>(v) + 1]; ++e) {
        if (side[static_cast<std::size_t>(v)] != side[static_cast<std::size_t>(g.adj[static_cast<std::size_t>(e)])]) {
          c += g.ew[static_cast<std::size_t>(e)];
        }
      }
    }
    return c / 2;
  }

  W penalty(const W w[2]) const {
    return std::max<W>(0, w[0] - max_w[0]) + std::max<W>(0, w[1] - max_w[1]);
  }

  // Gain of moving v to the other side: external minus internal weight.
  W gain(const std::vector<int>& side, Index v) const {
    W gsum = 0;
    for (Index e = g.xadj[static_cast<std::size_t>(v)]; e < g.xadj[static_cast<std::size_t>(v) + 1]; ++e) {
      const bool same = side[static_cast<std::size_t>(g.adj[static_cast<std::size_t>(e)])] == side[static_cast<std::size_t>(v)];
      gsum += same ? -g.ew[static_cast<std::size_t>(e)] : g.ew[static_cast<std::size_t>(e)];
    }
    return gsum;
  }

  // Fiduccia-Mattheyses passes. Queues are ordered by (-gain, vertex) so the
  // best move with the lowest index comes first. Infeasible states only allow
  // moves out of the overweight side.
  void refine(std::vector<int>& side, int passes) const {
    W w[2] = {0, 0};
    for (Index v = 0; v < g.n; ++v) w[side[static_cast<std::size_t>(v)]] += g.vw[static_cast<std::size_t>(v)];
    W cur_cut = cut(side);
    const Index stall_limit = std::max<Index>(32, g.n / 8);

    for (int pass = 0; pass < passes; ++pass) {
      std::set<std::pair<W, Index>> queue[2];
      std::vector<W> gains(static_cast<std::size_t>(g.n));
      std::vector<char> locked(static_cast<std::size_t>(g.n), 0);
      for (Index v = 0; v < g.n; ++v) {
        gains[static_cast<std::size_t>(v)] = gain(side, v);
        queue[side[static_cast<std::size_t>(v)]].insert({-gains[static_cast<std::size_t>(v)], v});
      }
      std::vector<Index> moves;
      W best_pen = penalty(w);
      W best_cut = cur_cut;
      std::size_t best_len = 0;
      W start_pen = best_pen;
      W start_cut = cur_cut;
      Index stall = 0;

      while (stall < stall_limit) {
        const W pen = penalty(w);
        Index pick = -1;
        W pick_gain = std::numeric_limits<W>::min();
        for (int s = 0; s < 2; ++s) {
          const int t = 1 - s;
          if (pen > 0 && w[s] <= max_w[s]) continue;
          int scanned = 0;
          for (auto it = queue[s].begin(); it != queue[s].end() && scanned < 16; ++it, ++scanned) {
            const Index v = it->second;
            const W vw = g.vw[static_cast<std::size_t>(v)];
            if (pen == 0 && w[t] + vw > max_w[t]) continue;
            const W gv = -it->first;
            if (gv > pick_gain || (gv == pick_gain && v < pick)) {
              pick = v;
              pick_gain = gv;
            }
            break;
          }
        }
        if (pick < 0) break;
        const int s = side[static_cast<std::size_t>(pick)];
        queue[s].erase({-gains[static_cast<std::size_t>(pick)], pick});
        locked[static_cast<std::size_t>(pick)] = 1;
        side[static_cast<std::size_t>(pick)] = 1 - s;
        w[s] -= g.vw[static_cast<std::size_t>(pick)];
        w[1 - s] += g.vw[static_cast<std::size_t>(pick)];
        cur_cut -= pick_gain;
        moves.push_back(pick);
        for (Index e = g.xadj[static_cast<std::size_t>(pick)]; e < g.xadj[static_cast<std::size_t>(pick) + 1]; ++e) {
          const Index u = g.adj[static_cast<std::size_t>(e)];
          if (locked[static_cast<std::size_t>(u)]) continue;
          const int su = side[static_cast<std::size_t>(u)];
          queue[su].erase({-gains[static_cast<std::size_t>(u)], u});
          const W delta = 2 * g.ew[static_cast<std::size_t>(e)];
          gains[static_cast<std::size_t>(u)] += (su == s) ? delta : -delta;
          queue[su].insert({-gains[static_cast<std::size_t>(u)], u});
        }
        const W np = penalty(w);
        if (np < best_pen || (np == best_pen && cur_cut < best_cut)) {
          best_pen = np;
          best_cut = cur_cut;
          best_len = moves.size();
          stall = 0;
        } else {
          ++stall;
        }
      }
      // Roll back past the best prefix.
      for (std::size_t k = moves.size(); k > best_len; --k) {
        const Index v = moves[k - 1];
        const int s = side[static_cast<std::size_t>(v)];
        side[static_cast<std::size_t>(v)] = 1 - s;
        w[s] -= g.vw[static_cast<std::size_t>(v)];
        w[1 - s] += g.vw[static_cast<std::size_t>(v)];
      }
      cur_cut = best_cut;
      if (best_pen == start_pen && best_cut == start_cut) break;
    }
  }

  // Greedy graph growing of side 0 from `seed` up to the target weight.
  std::vector<int> grow(Index seed, W target0) const {
    std::vector<int> side(static_cast<std::size_t>(g.n), 1);
    std::vector<W> gains(static_cast<std::size_t>(g.n), 0);
    std::vector<char> in_front(static_cast<std::size_t>(g.n), 0);
    std::set<std::pair<W, Index>> front;
    W w0 = 0;
    Index next_unassigned = 0;
    auto add = [&](Index v) {
      side[static_cast<std::size_t>(v)] = 0;
      w0 += g.vw[static_cast<std::size_t>(v)];
      for (Index e = g.xadj[static_cast<std::size_t>(v)]; e < g.xadj[static_cast<std::size_t>(v) + 1]; ++e) {
        const Index u = g.adj[static_cast<std::size_t>(e)];
        if (side[static_cast<std::size_t>(u)] == 0) continue;
        if (in_front[static_cast<std::size_t>(u)]) {
          front.erase({-gains[static_cast<std::size_t>(u)], u});
        } else {
          gains[static_cast<std::size_t>(u)] = gain(side, u);
          in_front[static_cast<std::size_t>(u)] = 1;
          front.insert({-gains[static_cast<std::size_t>(u)], u});
          continue;
        }
        gains[static_cast<std::size_t>(u)] += 2 * g.ew[static_cast<std::size_t>(e)];
        front.insert({-gains[static_cast<std::size_t>(u)], u});
      }
    };
    add(seed);
    if (in_front[static_cast<std::size_t>(seed)]) front.erase({-gains[static_cast<std::size_t>(seed)], seed});
    while (w0 < target0) {
      Index v = -1;
      while (!front.empty()) {
        const Index c = front.begin()->second;
        front.erase(front.begin());
        if (side[static_cast<std::size_t>(c)] == 1) {
          v = c;
          break;
        }
      }
      if (v < 0) {
        while (next_unassigned < g.n && side[static_cast<std::size_t>(next_unassigned)] == 0) ++next_unassigned;
        if (next_unassigned >= g.n) break;
        v = next_unassigned;
      }
      const W vw = g.vw[static_cast<std::size_t>(v)];
      // Stop when adding v overshoots by more than stopping short.
      if (w0 + vw > target0 && (w0 + vw - target0) > (target0 - w0)) break;
      in_front[static_cast<std::size_t>(v)] = 0;
      add(v);
    }
    return side;
  }
};

Index farthest_from(const Graph& g, Index s) {
  std::vector<Index> dist(static_cast<std::size_t>(g.n), -1);
  std::vector<Index> q{s};
  dist[static_cast<std::size_t>(s)] = 0;
  Index last = s;
  for (std::size_t h = 0; h < q.size(); ++h) {
    const Index v = q[h];
    last = v;
    for (Index e = g.xadj[static_cast<std::size_t>(v)]; e < g.xadj[static_cast<std::size_t>(v) + 1]; ++e) {
      const Index u = g.adj[static_cast<std::size_t>(e)];
      if (dist[static_cast<std::size_t>(u)] < 0) {
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
        q.push_back(u);
      }
    }
  }
  return last;
}

// Side 0 receives a fraction k0/k of the vertex weight.
std::vector<int> bisect(const Graph& g, Index k0, Index k, double tol, const GraphPartitionOptions& opt,
                        std::mt19937_64& rng) {
  const W total = g.total_weight();
  const W target0 = static_cast<W>(std::llround(static_cast<double>(total) * static_cast<double>(k0) / static_cast<double>(k)));

  std::vector<Graph> levels{g};
  std::vector<std::vector<Index>> maps;
  while (levels.back().n > std::max<Index>(opt.coarsen_to, 2)) {
    std::vector<Index> cmap;
    Graph c = coarsen(levels.back(), rng, cmap);
    if (static_cast<double>(c.n) > 0.95 * static_cast<double>(levels.back().n)) break;
    maps.push_back(std::move(cmap));
    levels.push_back(std::move(c));
  }

  auto limits = [&](Bisector& b) {
    b.max_w[0] = static_cast<W>(std::floor(static_cast<double>(target0) * (1.0 + tol)));
    b.max_w[1] = static_cast<W>(std::floor(static_cast<double>(total - target0) * (1.0 + tol)));
  };

  const Graph& coarse = levels.back();
  Bisector cb{coarse, {0, 0}};
  limits(cb);
  std::vector<Index> seeds{0, farthest_from(coarse, 0)};
  seeds.push_back(farthest_from(coarse, seeds.back()));
  for (int r = 0; r < 5 && coarse.n > 0; ++r) seeds.push_back(static_cast<Index>(rng() % static_cast<std::uint64_t>(coarse.n)));
  std::vector<int> best;
  W best_pen = 0, best_cut = 0;
  for (Index s : seeds) {
    auto side = cb.grow(s, target0);
    cb.refine(side, opt.refinement_passes);
    W w[2] = {0, 0};
    for (Index v = 0; v < coarse.n; ++v) w[side[static_cast<std::size_t>(v)]] += coarse.vw[static_cast<std::size_t>(v)];
    const W pen = cb.penalty(w);
    const W c = cb.cut(side);
    if (best.empty() || pen < best_pen || (pen == best_pen && c < best_cut)) {
      best = std::move(side);
      best_pen = pen;
      best_cut = c;
    }
  }

  for (std::size_t lv = maps.size(); lv > 0; --lv) {
    const Graph& fine = levels[lv - 1];
    const auto& cmap = maps[lv - 1];
    std::vector<int> side(static_cast<std::size_t>(fine.n));
    for (Index v = 0; v < fine.n; ++v) side[static_cast<std::size_t>(v)] = best[static_cast<std::size_t>(cmap[static_cast<std::size_t>(v)])];
    Bisector fb{fine, {0, 0}};
    limits(fb);
    fb.refine(side, opt.refinement_passes);
    best = std::move(side);
  }
  return best;
}

void recurse(const Graph& g, const std::vector<Index>& ids, Index k, Index first, double tol,
             const GraphPartitionOptions& opt, std::mt19937_64& rng, std::vector<Index>& xi) {
  if (k == 1 || g.n <= 1) {
    for (Index id : ids) xi[static_cast<std::size_t>(id)] = first;
    return;
  }
  const Index k0 = k / 2;
  const auto side = bisect(g, k0, k, tol, opt, rng);
  std::vector<Index> local[2];
  for (Index v = 0; v < g.n; ++v) local[side[static_cast<std::size_t>(v)]].push_back(v);
  for (int s = 0; s < 2; ++s) {
    std::vector<Index> sub_ids;
    for (Index v : local[s]) sub_ids.push_back(ids[static_cast<std::size_t>(v)]);
    const Graph sub = induced(g, local[s]);
    recurse(sub, sub_ids, s == 0 ? k0 : k - k0, s == 0 ? first : first + k0, tol, opt, rng, xi);
  }
}

}  // namespace

std::vector<Index> graph_partition(const SparseHermitian& a, Index m, const GraphPartitionOptions& options) {
  const Index n = a.size();
  if (m < 1) throw InputError("graph_partition: M must be >= 1");
  if (m > n) throw InputError("graph_partition: M=" + std::to_string(m) + " exceeds n=" + std::to_string(n));
  if (!(options.imbalance >= 0)) throw InputError("graph_partition: imbalance must be non-negative");

  const double depth = std::ceil(std::log2(static_cast<double>(m)));
  const double tol = depth > 0 ? std::pow(1.0 + options.imbalance, 1.0 / depth) - 1.0 : options.imbalance;

  std::mt19937_64 rng(options.seed);
  const Graph g = from_matrix(a);
  std::vector<Index> ids(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
  std::vector<Index> xi(static_cast<std::size_t>(n), -1);
  recurse(g, ids, m, 0, tol, options, rng, xi);

  // Relabel by smallest vertex; empty parts (possible only on degenerate
  // inputs) are reported by partition_from_map.
  std::vector<Index> relabel(static_cast<std::size_t>(m), -1);
  Index next = 0;
  for (Index v = 0; v < n; ++v) {
    Index& r = relabel[static_cast<std::size_t>(xi[static_cast<std::size_t>(v)])];
    if (r < 0) r = next++;
    xi[static_cast<std::size_t>(v)] = r;
  }
  return xi;
}

}  // namespace lss
