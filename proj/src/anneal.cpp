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
#include "msfc/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_map>

#include "msfc/error.hpp"

namespace msfc {

void check_params(const ForceParams& p) {
  for (double v : {p.attraction_gain, p.repulsion_gain, p.dipole_gain, p.w_len, p.w_space, p.temperature, p.delta,
                   p.dipole_radius, p.move_radius})
    if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("force parameters must be finite and non-negative");
  if (!std::isfinite(p.w_cross)) throw InvalidArgument("w_cross must be finite");
  if (!(p.cooling > 0.0 && p.cooling < 1.0)) throw InvalidArgument("cooling must lie in (0,1)");
  if (p.max_iters < 0 || p.convergence_window < 1 || p.max_moves_per_iter < 0)
    throw InvalidArgument("iteration limits must be non-negative");
  if (!(p.delta > 0.0)) throw InvalidArgument("delta must be positive");
}

ForceField centroid_attraction(const GridMapping& m, const InteractionGraph& g, double gain) {
  ForceField f;
  f.force.assign(static_cast<std::size_t>(g.vertex_count), {});
  std::vector<Vec2> sum(f.force.size());
  std::vector<int> deg(f.force.size(), 0);
  for (const auto& e : g.edges) {
    sum[static_cast<std::size_t>(e.u)] += to_vec(m.at(e.v));
    sum[static_cast<std::size_t>(e.v)] += to_vec(m.at(e.u));
    ++deg[static_cast<std::size_t>(e.u)];
    ++deg[static_cast<std::size_t>(e.v)];
  }
  for (std::size_t v = 0; v < f.force.size(); ++v) {
    if (deg[v] == 0) continue;
    const Vec2 centroid = (1.0 / deg[v]) * sum[v];
    f.force[v] = gain * (centroid - to_vec(m.placement[v]));
  }
  return f;
}

ForceField edge_repulsion(const GridMapping& m, const InteractionGraph& g, double gain, double delta,
                          std::int64_t* pairs) {
  ForceField f;
  f.force.assign(static_cast<std::size_t>(g.vertex_count), {});
  const std::size_t n = g.edges.size();
  std::vector<double> mx(n), my(n), fx(n, 0.0), fy(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Cell a = m.at(g.edges[i].u), b = m.at(g.edges[i].v);
    mx[i] = 0.5 * (a.x + b.x);
    my[i] = 0.5 * (a.y + b.y);
  }
  std::int64_t count = 0;
  const double d2min = delta * delta;
  for (std::size_t i = 0; i < n; ++i) {
    double ax = 0.0, ay = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = mx[i] - mx[j];
      const double dy = my[i] - my[j];
      const double d2 = dx * dx + dy * dy;
      double ux, uy, mag;
      if (d2 == 0.0) {
        ux = 1.0;
        uy = 0.0;
        mag = gain / d2min;
      } else {
        const double d = std::sqrt(d2);
        ux = dx / d;
        uy = dy / d;
        mag = gain / std::max(d2, d2min);
      }
      ax += mag * ux;
      ay += mag * uy;
      fx[j] -= mag * ux;
      fy[j] -= mag * uy;
    }
    fx[i] += ax;
    fy[i] += ay;
    count += static_cast<std::int64_t>(n - i - 1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 half{0.5 * fx[i], 0.5 * fy[i]};
    f.force[static_cast<std::size_t>(g.edges[i].u)] += half;
    f.force[static_cast<std::size_t>(g.edges[i].v)] += half;
  }
  if (pairs) *pairs = count;
  return f;
}

ForceField dipole_rotation(const GridMapping& m, const std::vector<TimestepLayer>& layers, int vertex_count,
                           double gain, double delta, double radius) {
  ForceField f;
  f.force.assign(static_cast<std::size_t>(vertex_count), {});
  std::vector<int> color(static_cast<std::size_t>(vertex_count), -1);
  std::vector<std::vector<int>> nb(static_cast<std::size_t>(vertex_count));
  std::unordered_map<std::int64_t, std::vector<int>> buckets;
  const double d2min = delta * delta;
  const double r2 = radius * radius;
  const int cell = std::max(1, static_cast<int>(std::ceil(radius)));
  for (const auto& layer : layers) {
    if (layer.edges.empty()) continue;
    std::vector<int> verts;
    for (auto [a, b] : layer.edges) {
      nb[static_cast<std::size_t>(a)].push_back(b);
      nb[static_cast<std::size_t>(b)].push_back(a);
      verts.push_back(a);
      verts.push_back(b);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    // Layer subgraphs are disjoint paths, so a walk 2-colors them.
    for (int s : verts) {
      if (color[static_cast<std::size_t>(s)] >= 0) continue;
      std::vector<int> stack{s};
      color[static_cast<std::size_t>(s)] = 0;
      while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u : nb[static_cast<std::size_t>(v)])
          if (color[static_cast<std::size_t>(u)] < 0) {
            color[static_cast<std::size_t>(u)] = 1 - color[static_cast<std::size_t>(v)];
            stack.push_back(u);
          }
      }
    }
    buckets.clear();
    auto key = [](int bx, int by) { return (static_cast<std::int64_t>(bx) << 32) ^ static_cast<std::uint32_t>(by); };
    for (int v : verts) {
      const Cell c = m.at(v);
      buckets[key(c.x / cell, c.y / cell)].push_back(v);
    }
    for (int p : verts) {
      const Cell cp = m.at(p);
      const int bx = cp.x / cell, by = cp.y / cell;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          auto it = buckets.find(key(bx + dx, by + dy));
          if (it == buckets.end()) continue;
          for (int q : it->second) {
            if (q == p) continue;
            const auto& np = nb[static_cast<std::size_t>(p)];
            if (std::find(np.begin(), np.end(), q) != np.end()) continue;
            const Cell cq = m.at(q);
            const double ex = cp.x - cq.x, ey = cp.y - cq.y;
            const double d2 = ex * ex + ey * ey;
            if (d2 > r2) continue;
            const double d = std::sqrt(d2);
            const double mag = gain / std::max(d2, d2min);
            const double sign = color[static_cast<std::size_t>(p)] == color[static_cast<std::size_t>(q)] ? 1.0 : -1.0;
            f.force[static_cast<std::size_t>(p)] += Vec2{sign * mag * ex / d, sign * mag * ey / d};
          }
        }
    }
    for (int v : verts) {
      color[static_cast<std::size_t>(v)] = -1;
      nb[static_cast<std::size_t>(v)].clear();
    }
  }
  return f;
}

ForceField dipole_rotation(const GridMapping& m, const Circuit& c, double gain, double delta, double radius) {
  return dipole_rotation(m, layers(c), static_cast<int>(c.qubits.size()), gain, delta, radius);
}

std::vector<int> spatial_clusters(const std::vector<Vec2>& points, double gap) {
  const std::size_t n = points.size();
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    label[s] = next;
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t u = 0; u < n; ++u)
        if (label[u] < 0 && (points[u] - points[v]).norm() <= gap) {
          label[u] = next;
          stack.push_back(u);
        }
    }
    ++next;
  }
  return label;
}

namespace {

Cell unit_step(Vec2 d) {
  const double len = d.norm();
  if (len < 1e-12) return {0, 0};
  return {static_cast<int>(std::lround(d.x / len)), static_cast<int>(std::lround(d.y / len))};
}

// Applies as many of the requested moves as fit without collisions.
void resolve_moves(GridMapping& m, std::vector<std::pair<int, Cell>> moves) {
  std::vector<QubitId> occ = m.occupancy();
  bool progress = true;
  while (progress && !moves.empty()) {
    progress = false;
    for (auto it = moves.begin(); it != moves.end();) {
      const auto [v, target] = *it;
      if (!m.in_bounds(target)) {
        it = moves.erase(it);
        continue;
      }
      auto& slot = occ[static_cast<std::size_t>(target.y) * m.width + target.x];
      if (slot != kNoQubit) {
        ++it;
        continue;
      }
      const Cell from = m.at(v);
      occ[static_cast<std::size_t>(from.y) * m.width + from.x] = kNoQubit;
      slot = v;
      m.placement[static_cast<std::size_t>(v)] = target;
      progress = true;
      it = moves.erase(it);
    }
  }
}

}  // namespace

GridMapping community_kick(const GridMapping& m, const CommunityPartition& partition, KickMode mode,
                           std::uint64_t seed, const std::vector<char>& movable) {
  GridMapping out = m;
  const std::size_t n = std::min(m.placement.size(), partition.label.size());
  auto can_move = [&](std::size_t v) { return m.placement[v] != kUnplaced && (movable.empty() || movable[v]); };
  std::vector<std::vector<int>> members(static_cast<std::size_t>(partition.count));
  Vec2 global{};
  int placed = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (!can_move(v)) continue;
    members[static_cast<std::size_t>(partition.label[v])].push_back(static_cast<int>(v));
    global += to_vec(m.placement[v]);
    ++placed;
  }
  if (placed == 0) return out;
  global = (1.0 / placed) * global;
  std::vector<std::pair<int, Cell>> moves;
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto& mem = members[c];
    if (mem.empty()) continue;
    Vec2 centroid{};
    for (int v : mem) centroid += to_vec(m.at(v));
    centroid = (1.0 / static_cast<double>(mem.size())) * centroid;
    if (mode == KickMode::Separate) {
      Cell step = unit_step(centroid - global);
      if (step == Cell{0, 0}) step = {c % 2 == 0 ? -1 : 1, 0};
      for (int v : mem) moves.emplace_back(v, Cell{m.at(v).x + step.x, m.at(v).y + step.y});
      continue;
    }
    std::vector<Vec2> pts;
    for (int v : mem) pts.push_back(to_vec(m.at(v)));
    const std::vector<int> comp = spatial_clusters(pts, 2.0);
    const int k = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    if (k < 2) continue;
    // Seeded k-means over the component count.
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<Vec2> centers;
    for (int i = 0; i < k; ++i) centers.push_back(pts[idx[static_cast<std::size_t>(i)]]);
    std::vector<int> assign(pts.size(), 0);
    for (int iter = 0; iter < 20; ++iter) {
      bool changed = false;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        int best = 0;
        for (int j = 1; j < k; ++j)
          if ((pts[i] - centers[static_cast<std::size_t>(j)]).norm() < (pts[i] - centers[static_cast<std::size_t>(best)]).norm())
            best = j;
        changed |= assign[i] != best;
        assign[i] = best;
      }
      std::vector<Vec2> sum(static_cast<std::size_t>(k));
      std::vector<int> cnt(static_cast<std::size_t>(k), 0);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        sum[static_cast<std::size_t>(assign[i])] += pts[i];
        ++cnt[static_cast<std::size_t>(assign[i])];
      }
      for (int j = 0; j < k; ++j)
        if (cnt[static_cast<std::size_t>(j)] > 0)
          centers[static_cast<std::size_t>(j)] = (1.0 / cnt[static_cast<std::size_t>(j)]) * sum[static_cast<std::size_t>(j)];
      if (!changed && iter > 0) break;
    }
    Vec2 mutual{};
    for (const Vec2& c2 : centers) mutual += c2;
    mutual = (1.0 / k) * mutual;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Cell step = unit_step(mutual - centers[static_cast<std::size_t>(assign[i])]);
      if (step == Cell{0, 0}) continue;
      const int v = mem[i];
      moves.emplace_back(v, Cell{m.at(v).x + step.x, m.at(v).y + step.y});
    }
  }
  // Vertices leading in their step direction move first.
  std::stable_sort(moves.begin(), moves.end(), [&](const auto& a, const auto& b) {
    const Cell da{a.second.x - m.at(a.first).x, a.second.y - m.at(a.first).y};
    const Cell db{b.second.x - m.at(b.first).x, b.second.y - m.at(b.first).y};
    return da.x * a.second.x + da.y * a.second.y > db.x * b.second.x + db.y * b.second.y;
  });
  resolve_moves(out, std::move(moves));
  return out;
}

double mapping_cost(const GridMapping& m, const InteractionGraph& g, double w_len, double w_space, double w_cross) {
  const double len = edge_length(m, g);
  const double sp = g.edges.size() >= 2 ? edge_spacing(m, g) : 0.0;
  return w_len * len - w_space * sp + w_cross * static_cast<double>(crossing_count(m, g));
}

namespace {

// Incremental evaluation of w_len*len - w_space*spacing + w_cross*crossings.
class CostModel {
 public:
  CostModel(const InteractionGraph& g, std::vector<Cell>& pos, double wl, double ws, double wx)
      : g_(g), pos_(pos), wl_(wl), ws_(ws), wx_(wx) {
    const std::size_t m = g.edges.size();
    inc_.resize(static_cast<std::size_t>(g.vertex_count));
    w_.resize(m);
    mx_.resize(m);
    my_.resize(m);
    mark_.assign(m, 0);
    double sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      inc_[static_cast<std::size_t>(g.edges[i].u)].push_back(static_cast<int>(i));
      inc_[static_cast<std::size_t>(g.edges[i].v)].push_back(static_cast<int>(i));
      w_[i] = g.edges[i].multiplicity;
      wsum_ += w_[i];
      sq += w_[i] * w_[i];
    }
    pairw_ = (wsum_ * wsum_ - sq) / 2.0;
    recompute();
  }

  void recompute() {
    const std::size_t m = g_.edges.size();
    len_ = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Cell a = pos_[static_cast<std::size_t>(g_.edges[i].u)], b = pos_[static_cast<std::size_t>(g_.edges[i].v)];
      mx_[i] = 0.5 * (a.x + b.x);
      my_[i] = 0.5 * (a.y + b.y);
      len_ += w_[i] * distance(a, b);
    }
    sp_ = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double row = 0.0;
      for (std::size_t j = i + 1; j < m; ++j) row += w_[j] * std::hypot(mx_[i] - mx_[j], my_[i] - my_[j]);
      sp_ += w_[i] * row;
    }
    GridMapping tmp;
    tmp.width = tmp.height = 1;
    tmp.placement = pos_;
    cross_ = crossing_count(tmp, g_);
  }

  double cost() const { return cost_of(len_, sp_, cross_); }
  double cost_of(double len, double sp, std::int64_t cross) const {
    const double l = wsum_ > 0 ? len / wsum_ : 0.0;
    const double s = pairw_ > 0 ? sp / pairw_ : 0.0;
    return wl_ * l - ws_ * s + wx_ * static_cast<double>(cross);
  }
  std::int64_t crossings() const { return cross_; }
  template <typename D>
  double cost_after(const D& d) const { return cost_of(len_ + d.len, sp_ + d.sp, cross_ + d.cross); }
  double avg_length() const { return wsum_ > 0 ? len_ / wsum_ : 0.0; }

  struct Delta {
    double len = 0.0;
    double sp = 0.0;
    std::int64_t cross = 0;
  };

  Delta delta(const std::vector<std::pair<int, Cell>>& moves) {
    collect(moves);
    Delta d;
    const std::size_t m = g_.edges.size();
    for (std::size_t a = 0; a < aff_.size(); ++a) {
      const int e = aff_[a];
      const Edge& ee = g_.edges[static_cast<std::size_t>(e)];
      const Cell o1 = pos_[static_cast<std::size_t>(ee.u)], o2 = pos_[static_cast<std::size_t>(ee.v)];
      const Cell n1 = moved(ee.u), n2 = moved(ee.v);
      d.len += w_[static_cast<std::size_t>(e)] * (distance(n1, n2) - distance(o1, o2));
      const double omx = mx_[static_cast<std::size_t>(e)], omy = my_[static_cast<std::size_t>(e)];
      const double nmx = 0.5 * (n1.x + n2.x), nmy = 0.5 * (n1.y + n2.y);
      const int ox0 = std::min(o1.x, o2.x), ox1 = std::max(o1.x, o2.x), oy0 = std::min(o1.y, o2.y), oy1 = std::max(o1.y, o2.y);
      const int nx0 = std::min(n1.x, n2.x), nx1 = std::max(n1.x, n2.x), ny0 = std::min(n1.y, n2.y), ny1 = std::max(n1.y, n2.y);
      double sp = 0.0;
      std::int64_t cr = 0;
      for (std::size_t f = 0; f < m; ++f) {
        if (mark_[f] == stamp_) continue;
        sp += w_[f] * (std::hypot(nmx - mx_[f], nmy - my_[f]) - std::hypot(omx - mx_[f], omy - my_[f]));
        const Edge& fe = g_.edges[f];
        if (fe.u == ee.u || fe.u == ee.v || fe.v == ee.u || fe.v == ee.v) continue;
        const Cell f1 = pos_[static_cast<std::size_t>(fe.u)], f2 = pos_[static_cast<std::size_t>(fe.v)];
        const int fx0 = std::min(f1.x, f2.x), fx1 = std::max(f1.x, f2.x), fy0 = std::min(f1.y, f2.y), fy1 = std::max(f1.y, f2.y);
        const bool ob = !(fx0 > ox1 || fx1 < ox0 || fy0 > oy1 || fy1 < oy0);
        const bool nbx = !(fx0 > nx1 || fx1 < nx0 || fy0 > ny1 || fy1 < ny0);
        if (ob && segments_intersect(o1, o2, f1, f2)) --cr;
        if (nbx && segments_intersect(n1, n2, f1, f2)) ++cr;
      }
      d.sp += w_[static_cast<std::size_t>(e)] * sp;
      d.cross += cr;
      for (std::size_t b = a + 1; b < aff_.size(); ++b) {
        const int f = aff_[b];
        const Edge& fe = g_.edges[static_cast<std::size_t>(f)];
        const Cell p1 = pos_[static_cast<std::size_t>(fe.u)], p2 = pos_[static_cast<std::size_t>(fe.v)];
        const Cell q1 = moved(fe.u), q2 = moved(fe.v);
        const double before = std::hypot(omx - mx_[static_cast<std::size_t>(f)], omy - my_[static_cast<std::size_t>(f)]);
        const double after = std::hypot(nmx - 0.5 * (q1.x + q2.x), nmy - 0.5 * (q1.y + q2.y));
        d.sp += w_[static_cast<std::size_t>(e)] * w_[static_cast<std::size_t>(f)] * (after - before);
        if (fe.u == ee.u || fe.u == ee.v || fe.v == ee.u || fe.v == ee.v) continue;
        d.cross += static_cast<int>(segments_intersect(n1, n2, q1, q2)) - static_cast<int>(segments_intersect(o1, o2, p1, p2));
      }
    }
    return d;
  }

  void apply(const std::vector<std::pair<int, Cell>>& moves, const Delta& d) {
    collect(moves);
    for (const auto& [v, c] : moves) pos_[static_cast<std::size_t>(v)] = c;
    for (int e : aff_) {
      const Edge& ee = g_.edges[static_cast<std::size_t>(e)];
      mx_[static_cast<std::size_t>(e)] = 0.5 * (pos_[static_cast<std::size_t>(ee.u)].x + pos_[static_cast<std::size_t>(ee.v)].x);
      my_[static_cast<std::size_t>(e)] = 0.5 * (pos_[static_cast<std::size_t>(ee.u)].y + pos_[static_cast<std::size_t>(ee.v)].y);
    }
    len_ += d.len;
    sp_ += d.sp;
    cross_ += d.cross;
  }

 private:
  void collect(const std::vector<std::pair<int, Cell>>& moves) {
    ++stamp_;
    aff_.clear();
    moves_ = &moves;
    for (const auto& [v, c] : moves)
      for (int e : inc_[static_cast<std::size_t>(v)])
        if (mark_[static_cast<std::size_t>(e)] != stamp_) {
          mark_[static_cast<std::size_t>(e)] = stamp_;
          aff_.push_back(e);
        }
  }

  Cell moved(QubitId v) const {
    for (const auto& [u, c] : *moves_)
      if (u == v) return c;
    return pos_[static_cast<std::size_t>(v)];
  }

  const InteractionGraph& g_;
  std::vector<Cell>& pos_;
  double wl_, ws_, wx_;
  std::vector<std::vector<int>> inc_;
  std::vector<double> w_, mx_, my_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::vector<int> aff_;
  const std::vector<std::pair<int, Cell>>* moves_ = nullptr;
  double wsum_ = 0.0, pairw_ = 0.0;
  double len_ = 0.0, sp_ = 0.0;
  std::int64_t cross_ = 0;
};

}  // namespace

GridMapping anneal(const GridMapping& initial, const AnnealInput& in, const ForceParams& params, AnnealStats* stats,
                   std::vector<AnnealTraceRow>* trace) {
  check_params(params);
  if (!in.graph || !in.layers) throw InvalidArgument("anneal needs a graph and its layers");
  const InteractionGraph& g = *in.graph;
  const auto n = static_cast<std::size_t>(g.vertex_count);
  if (initial.placement.size() != n) throw InvalidArgument("mapping size does not match the graph");
  for (std::size_t v = 0; v < n; ++v)
    if (!initial.in_bounds(initial.placement[v])) throw InvalidArgument("anneal needs every vertex placed in bounds");
  auto movable = [&](std::size_t v) { return in.movable.empty() || in.movable[v]; };

  GridMapping cur = initial;
  std::vector<QubitId> occ = cur.occupancy();
  const double wx = params.w_cross >= 0.0 ? params.w_cross : 2.0 * edge_length(initial, g);
  CostModel model(g, cur.placement, params.w_len, params.w_space, wx);
  const double initial_cost = model.cost();
  GridMapping best = cur;
  double best_cost = initial_cost;
  double temperature = params.temperature;
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t m = g.edges.size();
  const std::size_t budget = params.max_moves_per_iter > 0
                                 ? static_cast<std::size_t>(params.max_moves_per_iter)
                                 : (m <= 3000 ? n : std::max<std::size_t>(200, static_cast<std::size_t>(6e6 / static_cast<double>(m))));
  const int reach = static_cast<int>(std::floor(params.move_radius));
  const double cos45 = std::cos(M_PI / 4.0) - 1e-9;
  int stale = 0;
  KickMode next_kick = KickMode::Separate;
  AnnealStats local;
  local.initial_cost = initial_cost;
  std::vector<std::pair<int, Cell>> moves;
  struct Candidate {
    double d, ang;
    Cell cell;
    QubitId occupant;
  };
  std::vector<Candidate> cands;

  for (int iter = 0; iter < params.max_iters; ++iter) {
    ForceField fa = centroid_attraction(cur, g, params.attraction_gain);
    ForceField fr = edge_repulsion(cur, g, params.repulsion_gain, params.delta, &local.repulsion_pairs_last);
    ForceField fd = dipole_rotation(cur, *in.layers, g.vertex_count, params.dipole_gain, params.delta, params.dipole_radius);
    std::vector<std::pair<double, int>> order;
    for (std::size_t v = 0; v < n; ++v) {
      if (!movable(v)) continue;
      const Vec2 f = fa.force[v] + fr.force[v] + fd.force[v];
      fa.force[v] = f;
      const double mag = f.norm();
      if (mag > 1e-9 && std::isfinite(mag)) order.emplace_back(-mag, static_cast<int>(v));
    }
    std::sort(order.begin(), order.end());
    if (order.size() > budget) order.resize(budget);
    const double before = model.cost();
    for (const auto& [negmag, v] : order) {
      const Vec2 f = fa.force[static_cast<std::size_t>(v)];
      const double mag = -negmag;
      const Cell p = cur.at(v);
      // Up to three cone cells, nearest first; the first one accepted wins.
      cands.clear();
      for (int dy = -reach; dy <= reach; ++dy)
        for (int dx = -reach; dx <= reach; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const double d = std::hypot(dx, dy);
          if (d > params.move_radius + 1e-9) continue;
          const double cosang = (dx * f.x + dy * f.y) / (d * mag);
          if (cosang < cos45) continue;
          const Cell c{p.x + dx, p.y + dy};
          if (!cur.in_bounds(c)) continue;
          const QubitId o = occ[static_cast<std::size_t>(c.y) * cur.width + c.x];
          if (o != kNoQubit && !(params.swap_moves && movable(static_cast<std::size_t>(o)))) continue;
          cands.push_back({d, 1.0 - cosang, c, o});
        }
      std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (std::abs(a.d - b.d) > 1e-12) return a.d < b.d;
        return a.ang < b.ang - 1e-12;
      });
      if (cands.size() > 3) cands.resize(3);
      for (const Candidate& cand : cands) {
        moves.clear();
        moves.emplace_back(v, cand.cell);
        if (cand.occupant != kNoQubit) moves.emplace_back(cand.occupant, p);
        const CostModel::Delta d = model.delta(moves);
        const double diff = model.cost_after(d) - model.cost();
        bool accept = diff < -1e-12;
        if (!accept && params.simulated_annealing && temperature > 0.0)
          accept = diff <= 0.0 || unit(rng) < std::exp(-diff / temperature);
        if (!accept) continue;
        for (const auto& [u, c] : moves) occ[static_cast<std::size_t>(cur.at(u).y) * cur.width + cur.at(u).x] = kNoQubit;
        model.apply(moves, d);
        for (const auto& [u, c] : moves) occ[static_cast<std::size_t>(c.y) * cur.width + c.x] = u;
        ++local.accepted;
        break;
      }
    }
    if (params.simulated_annealing) temperature *= params.cooling;
    const double after_iter = model.cost();
    if (after_iter < best_cost - 1e-12) {
      best_cost = after_iter;
      best = cur;
    }
    stale = after_iter < before - 1e-12 ? 0 : stale + 1;
    if (trace) trace->push_back({iter, after_iter, model.crossings()});
    ++local.iterations;
    if (stale >= params.convergence_window) {
      stale = 0;
      if (!params.community_kicks || !in.partition) break;
      cur = community_kick(cur, *in.partition, next_kick, params.seed + static_cast<std::uint64_t>(iter), in.movable);
      next_kick = next_kick == KickMode::Separate ? KickMode::Gather : KickMode::Separate;
      occ = cur.occupancy();
      model.recompute();
      ++local.kicks;
    }
  }
  local.final_cost = best_cost;
  if (stats) *stats = local;
  return best;
}

GridMapping anneal(const GridMapping& initial, const Circuit& c, const ForceParams& params, AnnealStats* stats,
                   std::vector<AnnealTraceRow>* trace) {
  const InteractionGraph g = from_circuit(c);
  const auto ls = layers(c);
  const CommunityPartition part = communities(g, module_labels(c));
  AnnealInput in;
  in.graph = &g;
  in.layers = &ls;
  in.partition = &part;
  return anneal(initial, in, params, stats, trace);
}

void write_anneal_trace(std::ostream& os, const std::vector<AnnealTraceRow>& trace) {
  os << "iter,cost,crossings\n";
  for (const auto& r : trace) os << r.iter << ',' << r.cost << ',' << r.crossings << '\n';
}

}  // namespace msfc
