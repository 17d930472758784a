/* Copyright 2026 The msfc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "msfc/bisect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "msfc/error.hpp"

namespace msfc {

std::int64_t WGraph::total_vweight() const {
  return std::accumulate(vweight.begin(), vweight.end(), std::int64_t{0});
}

WGraph make_wgraph(int n, const std::vector<std::int64_t>& vweight,
                   std::vector<std::tuple<int, int, std::int64_t>> edges) {
  WGraph g;
  g.n = n;
  g.vweight = vweight;
  if (static_cast<int>(g.vweight.size()) != n) throw InvalidArgument("vertex weight count mismatch");
  for (auto& [u, v, w] : edges) {
    if (u == v || u < 0 || v < 0 || u >= n || v >= n) throw InvalidArgument("bad edge in weighted graph");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  std::vector<std::tuple<int, int, std::int64_t>> merged;
  for (const auto& e : edges) {
    if (!merged.empty() && std::get<0>(merged.back()) == std::get<0>(e) && std::get<1>(merged.back()) == std::get<1>(e))
      std::get<2>(merged.back()) += std::get<2>(e);
    else
      merged.push_back(e);
  }
  std::vector<int> deg(static_cast<std::size_t>(n), 0);
  for (const auto& [u, v, w] : merged) {
    ++deg[static_cast<std::size_t>(u)];
    ++deg[static_cast<std::size_t>(v)];
  }
  g.xadj.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) g.xadj[static_cast<std::size_t>(i) + 1] = g.xadj[static_cast<std::size_t>(i)] + deg[static_cast<std::size_t>(i)];
  g.adj.resize(static_cast<std::size_t>(g.xadj.back()));
  g.eweight.resize(g.adj.size());
  std::vector<int> fill(g.xadj.begin(), g.xadj.end() - 1);
  // Sorted edge order keeps each adjacency list sorted by neighbor.
  for (const auto& [u, v, w] : merged) {
    const auto iu = static_cast<std::size_t>(fill[static_cast<std::size_t>(u)]++);
    g.adj[iu] = v;
    g.eweight[iu] = w;
  }
  for (const auto& [u, v, w] : merged) {
    const auto iv = static_cast<std::size_t>(fill[static_cast<std::size_t>(v)]++);
    g.adj[iv] = u;
    g.eweight[iv] = w;
  }
  for (int i = 0; i < n; ++i) {
    const auto b = static_cast<std::size_t>(g.xadj[static_cast<std::size_t>(i)]);
    const auto e = static_cast<std::size_t>(g.xadj[static_cast<std::size_t>(i) + 1]);
    std::vector<std::pair<int, std::int64_t>> tmp;
    for (std::size_t j = b; j < e; ++j) tmp.emplace_back(g.adj[j], g.eweight[j]);
    std::sort(tmp.begin(), tmp.end());
    for (std::size_t j = b; j < e; ++j) std::tie(g.adj[j], g.eweight[j]) = tmp[j - b];
  }
  return g;
}

WGraph to_wgraph(const InteractionGraph& g) {
  std::vector<std::tuple<int, int, std::int64_t>> edges;
  edges.reserve(g.edges.size());
  for (const auto& e : g.edges) edges.emplace_back(e.u, e.v, e.multiplicity);
  return make_wgraph(g.vertex_count, std::vector<std::int64_t>(static_cast<std::size_t>(g.vertex_count), 1),
                     std::move(edges));
}

std::vector<CoarseGraph> coarsen(const WGraph& g, BisectStats* stats) {
  std::vector<CoarseGraph> levels;
  levels.push_back({0, g, {}});
  while (true) {
    const WGraph& cur = levels.back().graph;
    if (cur.n <= 1) break;
    if (levels.size() > 1 && cur.n < 24) break;
    std::vector<std::tuple<std::int64_t, int, int>> order;
    for (int u = 0; u < cur.n; ++u)
      for (int j = cur.xadj[static_cast<std::size_t>(u)]; j < cur.xadj[static_cast<std::size_t>(u) + 1]; ++j) {
        const int v = cur.adj[static_cast<std::size_t>(j)];
        if (u < v) order.emplace_back(-cur.eweight[static_cast<std::size_t>(j)], u, v);
      }
    if (stats) stats->work += static_cast<std::int64_t>(cur.adj.size());
    std::sort(order.begin(), order.end());
    std::vector<int> match(static_cast<std::size_t>(cur.n), -1);
    for (const auto& [w, u, v] : order)
      if (match[static_cast<std::size_t>(u)] < 0 && match[static_cast<std::size_t>(v)] < 0) {
        match[static_cast<std::size_t>(u)] = v;
        match[static_cast<std::size_t>(v)] = u;
      }
    std::vector<int> cmap(static_cast<std::size_t>(cur.n), -1);
    int next = 0;
    for (int v = 0; v < cur.n; ++v) {
      if (cmap[static_cast<std::size_t>(v)] >= 0) continue;
      cmap[static_cast<std::size_t>(v)] = next;
      if (match[static_cast<std::size_t>(v)] >= 0) cmap[static_cast<std::size_t>(match[static_cast<std::size_t>(v)])] = next;
      ++next;
    }
    if (next == cur.n) break;
    if (levels.size() > 1 && next > 0.9 * cur.n) break;
    std::vector<std::int64_t> vw(static_cast<std::size_t>(next), 0);
    for (int v = 0; v < cur.n; ++v) vw[static_cast<std::size_t>(cmap[static_cast<std::size_t>(v)])] += cur.vweight[static_cast<std::size_t>(v)];
    std::vector<std::tuple<int, int, std::int64_t>> edges;
    for (int u = 0; u < cur.n; ++u)
      for (int j = cur.xadj[static_cast<std::size_t>(u)]; j < cur.xadj[static_cast<std::size_t>(u) + 1]; ++j) {
        const int v = cur.adj[static_cast<std::size_t>(j)];
        const int cu = cmap[static_cast<std::size_t>(u)];
        const int cv = cmap[static_cast<std::size_t>(v)];
        if (u < v && cu != cv) edges.emplace_back(cu, cv, cur.eweight[static_cast<std::size_t>(j)]);
      }
    CoarseGraph cg;
    cg.level = static_cast<int>(levels.size());
    cg.graph = make_wgraph(next, vw, std::move(edges));
    cg.projection = std::move(cmap);
    levels.push_back(std::move(cg));
  }
  if (stats) stats->levels += static_cast<int>(levels.size());
  return levels;
}

std::int64_t cut_weight(const WGraph& g, const std::vector<std::uint8_t>& side) {
  std::int64_t cut = 0;
  for (int u = 0; u < g.n; ++u)
    for (int j = g.xadj[static_cast<std::size_t>(u)]; j < g.xadj[static_cast<std::size_t>(u) + 1]; ++j) {
      const int v = g.adj[static_cast<std::size_t>(j)];
      if (u < v && side[static_cast<std::size_t>(u)] != side[static_cast<std::size_t>(v)]) cut += g.eweight[static_cast<std::size_t>(j)];
    }
  return cut;
}

namespace {

struct Balance {
  double total;
  double target;
  double dev;
  std::int64_t cap_a;
  std::int64_t cap_b;
  // Extra imbalance tolerated inside a pass so single moves can act as swaps.
  double slack;

  double violation(std::int64_t wa) const {
    double v = std::max(0.0, std::abs(static_cast<double>(wa) - target) - dev);
    if (cap_a >= 0) v += std::max<double>(0.0, static_cast<double>(wa - cap_a));
    if (cap_b >= 0) v += std::max<double>(0.0, static_cast<double>(static_cast<std::int64_t>(total) - wa - cap_b));
    return v;
  }
};

Balance make_balance(const WGraph& g, const BisectOptions& opts) {
  const double total = static_cast<double>(g.total_vweight());
  std::int64_t maxw = 0;
  for (auto w : g.vweight) maxw = std::max(maxw, w);
  Balance b;
  b.total = total;
  b.target = opts.target_fraction * total;
  b.dev = std::max(opts.tolerance * total / 2.0, static_cast<double>(maxw) / 2.0);
  b.cap_a = opts.cap_a;
  b.cap_b = opts.cap_b;
  b.slack = static_cast<double>(maxw);
  return b;
}

std::vector<int> weight_order(const WGraph& g) {
  std::vector<int> by_weight(static_cast<std::size_t>(g.n));
  std::iota(by_weight.begin(), by_weight.end(), 0);
  std::stable_sort(by_weight.begin(), by_weight.end(), [&](int a, int b) {
    return g.vweight[static_cast<std::size_t>(a)] > g.vweight[static_cast<std::size_t>(b)];
  });
  return by_weight;
}

// Breadth-first growth of side A from `start`, then from heavy leftovers.
std::vector<std::uint8_t> initial_split(const WGraph& g, const BisectOptions& opts, int start) {
  std::vector<std::uint8_t> side(static_cast<std::size_t>(g.n), 1);
  const double goal = opts.target_fraction * static_cast<double>(g.total_vweight());
  std::vector<int> by_weight = weight_order(g);
  std::rotate(by_weight.begin(), std::find(by_weight.begin(), by_weight.end(), start), std::find(by_weight.begin(), by_weight.end(), start) + 1);
  std::vector<char> queued(static_cast<std::size_t>(g.n), 0);
  std::vector<int> queue;
  std::size_t head = 0;
  std::size_t seed_pos = 0;
  double wa = 0.0;
  while (wa < goal) {
    if (head == queue.size()) {
      while (seed_pos < by_weight.size() && queued[static_cast<std::size_t>(by_weight[seed_pos])]) ++seed_pos;
      if (seed_pos == by_weight.size()) break;
      queue.push_back(by_weight[seed_pos]);
      queued[static_cast<std::size_t>(by_weight[seed_pos])] = 1;
    }
    const int v = queue[head++];
    side[static_cast<std::size_t>(v)] = 0;
    wa += static_cast<double>(g.vweight[static_cast<std::size_t>(v)]);
    for (int j = g.xadj[static_cast<std::size_t>(v)]; j < g.xadj[static_cast<std::size_t>(v) + 1]; ++j) {
      const int u = g.adj[static_cast<std::size_t>(j)];
      if (!queued[static_cast<std::size_t>(u)]) {
        queued[static_cast<std::size_t>(u)] = 1;
        queue.push_back(u);
      }
    }
  }
  return side;
}

}  // namespace

std::int64_t fm_refine(const WGraph& g, std::vector<std::uint8_t>& side, const BisectOptions& opts,
                       BisectStats* stats) {
  const Balance bal = make_balance(g, opts);
  std::int64_t cut = cut_weight(g, side);
  if (stats) stats->work += static_cast<std::int64_t>(g.adj.size());
  std::int64_t wa = 0;
  for (int v = 0; v < g.n; ++v)
    if (side[static_cast<std::size_t>(v)] == 0) wa += g.vweight[static_cast<std::size_t>(v)];
  std::vector<std::int64_t> gain(static_cast<std::size_t>(g.n));
  std::vector<char> locked(static_cast<std::size_t>(g.n));
  std::vector<int> moves;
  for (int pass = 0; pass < opts.max_passes; ++pass) {
    std::set<std::pair<std::int64_t, int>> bucket[2];
    for (int v = 0; v < g.n; ++v) {
      std::int64_t gv = 0;
      const auto sv = side[static_cast<std::size_t>(v)];
      for (int j = g.xadj[static_cast<std::size_t>(v)]; j < g.xadj[static_cast<std::size_t>(v) + 1]; ++j)
        gv += side[static_cast<std::size_t>(g.adj[static_cast<std::size_t>(j)])] != sv ? g.eweight[static_cast<std::size_t>(j)]
                                                                                          : -g.eweight[static_cast<std::size_t>(j)];
      gain[static_cast<std::size_t>(v)] = gv;
      locked[static_cast<std::size_t>(v)] = 0;
      bucket[sv].insert({-gv, v});
    }
    if (stats) stats->work += static_cast<std::int64_t>(g.adj.size());
    const double start_viol = bal.violation(wa);
    const std::int64_t start_cut = cut;
    double best_viol = start_viol;
    std::int64_t best_cut = start_cut;
    std::size_t best_len = 0;
    moves.clear();
    const std::size_t stale_limit = std::max<std::size_t>(64, static_cast<std::size_t>(g.n) / 4);
    while (true) {
      const double viol = bal.violation(wa);
      int pick = -1;
      double pick_viol = 0.0;
      for (int s = 0; s < 2; ++s) {
        int scanned = 0;
        for (auto it = bucket[s].begin(); it != bucket[s].end() && scanned < 16; ++it, ++scanned) {
          const int v = it->second;
          const std::int64_t w = g.vweight[static_cast<std::size_t>(v)];
          const std::int64_t nwa = s == 0 ? wa - w : wa + w;
          const double nv = bal.violation(nwa);
          if (!(nv <= bal.slack || nv < viol)) continue;
          if (pick < 0) {
            pick = v;
            pick_viol = nv;
          } else {
            const std::int64_t gp = gain[static_cast<std::size_t>(pick)];
            const std::int64_t gv = gain[static_cast<std::size_t>(v)];
            const bool better_gain = gv > gp || (gv == gp && v < pick);
            if (viol > 0.0 ? nv < pick_viol || (nv == pick_viol && better_gain) : better_gain) {
              pick = v;
              pick_viol = nv;
            }
          }
          break;
        }
      }
      if (pick < 0) break;
      const auto ps = side[static_cast<std::size_t>(pick)];
      bucket[ps].erase({-gain[static_cast<std::size_t>(pick)], pick});
      locked[static_cast<std::size_t>(pick)] = 1;
      cut -= gain[static_cast<std::size_t>(pick)];
      wa += ps == 0 ? -g.vweight[static_cast<std::size_t>(pick)] : g.vweight[static_cast<std::size_t>(pick)];
      side[static_cast<std::size_t>(pick)] = static_cast<std::uint8_t>(1 - ps);
      moves.push_back(pick);
      for (int j = g.xadj[static_cast<std::size_t>(pick)]; j < g.xadj[static_cast<std::size_t>(pick) + 1]; ++j) {
        const int u = g.adj[static_cast<std::size_t>(j)];
        if (locked[static_cast<std::size_t>(u)]) continue;
        const auto su = side[static_cast<std::size_t>(u)];
        bucket[su].erase({-gain[static_cast<std::size_t>(u)], u});
        const std::int64_t w = g.eweight[static_cast<std::size_t>(j)];
        gain[static_cast<std::size_t>(u)] += su == ps ? 2 * w : -2 * w;
        bucket[su].insert({-gain[static_cast<std::size_t>(u)], u});
      }
      if (stats) stats->work += g.xadj[static_cast<std::size_t>(pick) + 1] - g.xadj[static_cast<std::size_t>(pick)] + 1;
      const double nv = bal.violation(wa);
      if (std::tie(nv, cut) < std::tie(best_viol, best_cut)) {
        best_viol = nv;
        best_cut = cut;
        best_len = moves.size();
      } else if (moves.size() - best_len > stale_limit) {
        break;
      }
    }
    for (std::size_t i = moves.size(); i > best_len; --i) {
      const int v = moves[i - 1];
      const auto sv = side[static_cast<std::size_t>(v)];
      wa += sv == 0 ? -g.vweight[static_cast<std::size_t>(v)] : g.vweight[static_cast<std::size_t>(v)];
      side[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(1 - sv);
    }
    cut = best_cut;
    if (!(std::tie(best_viol, best_cut) < std::tie(start_viol, start_cut))) break;
  }
  return cut;
}

namespace {

Bisection finish(const WGraph& g, std::vector<std::uint8_t> side) {
  Bisection b;
  b.cut = cut_weight(g, side);
  for (int v = 0; v < g.n; ++v)
    (side[static_cast<std::size_t>(v)] == 0 ? b.weight_a : b.weight_b) += g.vweight[static_cast<std::size_t>(v)];
  b.balance = std::abs(b.weight_a - b.weight_b);
  b.side = std::move(side);
  return b;
}

}  // namespace

Bisection bisect(const std::vector<CoarseGraph>& hierarchy, const BisectOptions& opts, BisectStats* stats) {
  if (hierarchy.empty()) throw InvalidArgument("empty coarsening hierarchy");
  const WGraph& coarsest = hierarchy.back().graph;
  // Several growth seeds on the coarsest graph; keep the best refined split.
  const std::vector<int> order = weight_order(coarsest);
  std::vector<int> starts;
  for (int v : order) {
    if (static_cast<int>(starts.size()) >= std::max(1, opts.initial_tries)) break;
    starts.push_back(v);
  }
  const Balance bal = make_balance(coarsest, opts);
  std::vector<std::uint8_t> side;
  std::pair<double, std::int64_t> best{std::numeric_limits<double>::infinity(), 0};
  for (int start : starts) {
    std::vector<std::uint8_t> trial = initial_split(coarsest, opts, start);
    const std::int64_t cut = fm_refine(coarsest, trial, opts, stats);
    std::int64_t wa = 0;
    for (int v = 0; v < coarsest.n; ++v)
      if (trial[static_cast<std::size_t>(v)] == 0) wa += coarsest.vweight[static_cast<std::size_t>(v)];
    const std::pair<double, std::int64_t> score{bal.violation(wa), cut};
    if (score < best) {
      best = score;
      side = std::move(trial);
    }
  }
  for (std::size_t lvl = hierarchy.size() - 1; lvl > 0; --lvl) {
    const auto& proj = hierarchy[lvl].projection;
    const WGraph& finer = hierarchy[lvl - 1].graph;
    std::vector<std::uint8_t> fine(static_cast<std::size_t>(finer.n));
    for (int v = 0; v < finer.n; ++v) fine[static_cast<std::size_t>(v)] = side[static_cast<std::size_t>(proj[static_cast<std::size_t>(v)])];
    side = std::move(fine);
    fm_refine(finer, side, opts, stats);
  }
  return finish(hierarchy.front().graph, std::move(side));
}

Bisection bisect_graph(const WGraph& g, const BisectOptions& opts, BisectStats* stats) {
  return bisect(coarsen(g, stats), opts, stats);
}

namespace {

struct Rect {
  int x, y, w, h;
  std::int64_t area() const { return static_cast<std::int64_t>(w) * h; }
  Vec2 center() const { return {x + (w - 1) / 2.0, y + (h - 1) / 2.0}; }
};

class Embedder {
 public:
  Embedder(const WGraph& g, const BisectOptions& opts, BisectStats* stats, GridMapping& out)
      : g_(g), opts_(opts), stats_(stats), out_(out), local_(static_cast<std::size_t>(g.n), -1),
        member_(static_cast<std::size_t>(g.n), 0), anchor_(static_cast<std::size_t>(g.n)),
        index_(static_cast<std::size_t>(g.n), -1) {}

  void run(const std::vector<int>& vertices, Rect r) {
    for (int v : vertices) {
      member_[static_cast<std::size_t>(v)] = 1;
      anchor_[static_cast<std::size_t>(v)] = r.center();
    }
    place(vertices, r);
  }

 private:
  void place(const std::vector<int>& vs, Rect r) {
    if (vs.empty()) return;
    if (static_cast<std::int64_t>(vs.size()) > r.area()) throw InfeasibleError("grid rectangle cannot hold its vertices");
    if (vs.size() == 1) {
      out_.placement[static_cast<std::size_t>(vs[0])] = {r.x + (r.w - 1) / 2, r.y + (r.h - 1) / 2};
      return;
    }
    const WGraph sub = subgraph(vs);
    BisectOptions o = opts_;
    o.target_fraction = 0.5;
    o.cap_a = o.cap_b = -1;
    Bisection b = bisect_graph(sub, o, stats_);
    const bool along_x = r.w >= r.h;
    const int len = along_x ? r.w : r.h;
    const int other = along_x ? r.h : r.w;
    auto count = [&](const Bisection& bb, int s) {
      std::int64_t n = 0;
      for (auto x : bb.side) n += x == s;
      return n;
    };
    std::int64_t na = count(b, 0), nb = count(b, 1);
    int split = -1;
    auto feasible = [&](int s) {
      return s >= 0 && s <= len && static_cast<std::int64_t>(s) * other >= na &&
             static_cast<std::int64_t>(len - s) * other >= nb && (na == 0 || s > 0) && (nb == 0 || s < len);
    };
    auto choose = [&] {
      const int ideal = static_cast<int>(std::lround(len * static_cast<double>(na) / static_cast<double>(na + nb)));
      for (int d = 0; d <= len; ++d) {
        if (feasible(ideal - d)) return ideal - d;
        if (feasible(ideal + d)) return ideal + d;
      }
      return -1;
    };
    split = choose();
    if (split < 0) {
      if (stats_) ++stats_->rebalances;
      const int s = std::clamp(static_cast<int>(std::lround(len * static_cast<double>(na) / static_cast<double>(na + nb))), 1, len - 1);
      o.cap_a = static_cast<std::int64_t>(s) * other;
      o.cap_b = static_cast<std::int64_t>(len - s) * other;
      o.target_fraction = static_cast<double>(o.cap_a) / static_cast<double>(o.cap_a + o.cap_b);
      b.side = rebalance(sub, b.side, o);
      na = count(b, 0);
      nb = count(b, 1);
      split = choose();
      if (split < 0) throw InfeasibleError("grid split cannot hold the bisection parts");
    }
    Rect r1 = r, r2 = r;
    if (along_x) {
      r1.w = split;
      r2.x = r.x + split;
      r2.w = r.w - split;
    } else {
      r1.h = split;
      r2.y = r.y + split;
      r2.h = r.h - split;
    }
    std::vector<int> part[2];
    for (std::size_t i = 0; i < vs.size(); ++i) part[b.side[i]].push_back(vs[i]);
    // Orient the halves toward where their outside neighbors sit.
    const double keep = pull(part[0], r1) + pull(part[1], r2);
    const double swap = pull(part[0], r2) + pull(part[1], r1);
    if (swap < keep && feasible_swap(part, r1, r2)) std::swap(part[0], part[1]);
    for (int v : part[0]) anchor_[static_cast<std::size_t>(v)] = r1.center();
    for (int v : part[1]) anchor_[static_cast<std::size_t>(v)] = r2.center();
    place(part[0], r1);
    place(part[1], r2);
  }

  static bool feasible_swap(const std::vector<int>* part, Rect r1, Rect r2) {
    return static_cast<std::int64_t>(part[1].size()) <= r1.area() && static_cast<std::int64_t>(part[0].size()) <= r2.area();
  }

  std::vector<std::uint8_t> rebalance(const WGraph& sub, std::vector<std::uint8_t> side, const BisectOptions& o) {
    BisectOptions strict = o;
    strict.tolerance = 0.0;
    fm_refine(sub, side, strict, stats_);
    return side;
  }

  double pull(const std::vector<int>& vs, Rect r) {
    const Vec2 c = r.center();
    double cost = 0.0;
    for (int v : vs) {
      for (int j = g_.xadj[static_cast<std::size_t>(v)]; j < g_.xadj[static_cast<std::size_t>(v) + 1]; ++j) {
        const int u = g_.adj[static_cast<std::size_t>(j)];
        if (!member_[static_cast<std::size_t>(u)] || local_[static_cast<std::size_t>(u)] == stamp_) continue;
        cost += static_cast<double>(g_.eweight[static_cast<std::size_t>(j)]) * (anchor_[static_cast<std::size_t>(u)] - c).norm();
      }
    }
    return cost;
  }

  WGraph subgraph(const std::vector<int>& vs) {
    ++stamp_;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      local_[static_cast<std::size_t>(vs[i])] = stamp_;
      index_[static_cast<std::size_t>(vs[i])] = static_cast<int>(i);
    }
    std::vector<std::tuple<int, int, std::int64_t>> edges;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const int v = vs[i];
      for (int j = g_.xadj[static_cast<std::size_t>(v)]; j < g_.xadj[static_cast<std::size_t>(v) + 1]; ++j) {
        const int u = g_.adj[static_cast<std::size_t>(j)];
        if (u > v && local_[static_cast<std::size_t>(u)] == stamp_)
          edges.emplace_back(static_cast<int>(i), index_[static_cast<std::size_t>(u)], g_.eweight[static_cast<std::size_t>(j)]);
      }
      if (stats_) stats_->work += g_.xadj[static_cast<std::size_t>(v) + 1] - g_.xadj[static_cast<std::size_t>(v)];
    }
    std::vector<std::int64_t> vw;
    vw.reserve(vs.size());
    for (int v : vs) vw.push_back(g_.vweight[static_cast<std::size_t>(v)]);
    return make_wgraph(static_cast<int>(vs.size()), vw, std::move(edges));
  }

  const WGraph& g_;
  const BisectOptions& opts_;
  BisectStats* stats_;
  GridMapping& out_;
  std::vector<int> local_;
  std::vector<char> member_;
  std::vector<Vec2> anchor_;
  std::vector<int> index_;
  int stamp_ = 0;
};

}  // namespace

GridMapping embed(const InteractionGraph& g, int width, int height, const BisectOptions& opts, BisectStats* stats,
                  const std::vector<QubitId>& vertices) {
  if (width <= 0 || height <= 0) throw InvalidArgument("grid dimensions must be positive");
  std::vector<int> vs(vertices.begin(), vertices.end());
  if (vs.empty()) {
    vs.resize(static_cast<std::size_t>(g.vertex_count));
    std::iota(vs.begin(), vs.end(), 0);
  }
  if (static_cast<std::int64_t>(vs.size()) > static_cast<std::int64_t>(width) * height)
    throw InfeasibleError("grid capacity below vertex count");
  GridMapping m;
  m.width = width;
  m.height = height;
  m.placement.assign(static_cast<std::size_t>(g.vertex_count), kUnplaced);
  const WGraph wg = to_wgraph(g);
  Embedder e(wg, opts, stats, m);
  e.run(vs, Rect{0, 0, width, height});
  return m;
}

}  // namespace msfc
