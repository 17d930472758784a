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
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "msfc/bisect.hpp"
#include "msfc/igraph.hpp"
#include "msfc/layout.hpp"
#include "msfc/protocol.hpp"
#include "msfc/stitch.hpp"

namespace testing {

using msfc::Cell;
using msfc::QubitId;

// Seeded generator shared by the property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& engine() { return rng_; }

  Cell cell(int w, int h) { return {uniform(0, w - 1), uniform(0, h - 1)}; }

  // `n` distinct cells of a w x h grid.
  std::vector<Cell> distinct_cells(int n, int w, int h) {
    std::vector<Cell> all;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) all.push_back({x, y});
    std::shuffle(all.begin(), all.end(), rng_);
    all.resize(static_cast<std::size_t>(n));
    return all;
  }

  // Random circuit over `n` qubits mixing every non-barrier gate kind.
  msfc::Circuit circuit(int n, int gates) {
    msfc::Circuit c;
    c.k = 1;
    c.levels = 1;
    for (int i = 0; i < n; ++i) c.qubits.push_back({i, msfc::Role::Ancilla, 1, 0, i});
    for (int i = 0; i < gates; ++i) {
      msfc::Gate g;
      g.round = 1;
      g.module_index = 0;
      const int pick = uniform(0, 9);
      std::vector<QubitId> ids(static_cast<std::size_t>(n));
      std::iota(ids.begin(), ids.end(), 0);
      std::shuffle(ids.begin(), ids.end(), rng_);
      if (pick < 2 || n < 2) {
        g.kind = pick == 0 ? msfc::GateKind::H : msfc::GateKind::MeasX;
        g.operands = {ids[0]};
      } else if (pick < 6) {
        g.kind = msfc::GateKind::CNOT;
        g.operands = {ids[0], ids[1]};
      } else if (pick < 8) {
        g.kind = pick == 6 ? msfc::GateKind::InjectT : msfc::GateKind::InjectTdag;
        g.operands = {ids[0], ids[1]};
      } else {
        g.kind = msfc::GateKind::CXX;
        const int arity = uniform(2, std::min(n, 4));
        g.operands.assign(ids.begin(), ids.begin() + arity);
      }
      c.gates.push_back(g);
    }
    return c;
  }

  // Random graph with unit vertex weights and weights in [1, max_w].
  msfc::WGraph wgraph(int n, double density, int max_w) {
    std::vector<std::tuple<int, int, std::int64_t>> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (coin(density)) edges.emplace_back(u, v, uniform(1, max_w));
    return msfc::make_wgraph(n, std::vector<std::int64_t>(static_cast<std::size_t>(n), 1), edges);
  }

  msfc::InteractionGraph igraph(int n, int edges) {
    msfc::InteractionGraph g;
    g.vertex_count = n;
    std::set<std::pair<int, int>> seen;
    edges = std::min(edges, n * (n - 1) / 2);
    while (static_cast<int>(g.edges.size()) < edges) {
      int u = uniform(0, n - 1), v = uniform(0, n - 1);
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      if (!seen.insert({u, v}).second) continue;
      g.edges.push_back({u, v, uniform(1, 3), {1}});
    }
    return g;
  }

 private:
  std::mt19937_64 rng_;
};

inline msfc::GridMapping mapping_of(const std::vector<Cell>& cells, int w, int h) {
  msfc::GridMapping m;
  m.width = w;
  m.height = h;
  m.placement = cells;
  return m;
}

// Closed-segment intersection solved with exact rational parameters.
inline bool oracle_intersect(Cell a, Cell b, Cell c, Cell d) {
  const std::int64_t rx = b.x - a.x, ry = b.y - a.y, sx = d.x - c.x, sy = d.y - c.y;
  const std::int64_t qx = c.x - a.x, qy = c.y - a.y;
  const std::int64_t den = rx * sy - ry * sx;
  if (den != 0) {
    // a + t r = c + u s with t = tn/den, u = un/den, both in [0, 1].
    std::int64_t tn = qx * sy - qy * sx, un = qx * ry - qy * rx, dd = den;
    if (dd < 0) tn = -tn, un = -un, dd = -dd;
    return tn >= 0 && tn <= dd && un >= 0 && un <= dd;
  }
  if (qx * ry - qy * rx != 0) return false;  // parallel, not collinear
  // Collinear: project onto the dominant axis of the longer segment.
  const bool use_x = std::abs(rx) + std::abs(sx) >= std::abs(ry) + std::abs(sy);
  auto lo_hi = [&](Cell p, Cell q) {
    const int u = use_x ? p.x : p.y, v = use_x ? q.x : q.y;
    return std::pair{std::min(u, v), std::max(u, v)};
  };
  auto [l1, h1] = lo_hi(a, b);
  auto [l2, h2] = lo_hi(c, d);
  if (rx == 0 && ry == 0 && sx == 0 && sy == 0) return a == c;
  return std::max(l1, l2) <= std::min(h1, h2);
}

inline std::int64_t oracle_crossings(const msfc::GridMapping& m, const msfc::InteractionGraph& g) {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    for (std::size_t j = i + 1; j < g.edges.size(); ++j) {
      const auto& e = g.edges[i];
      const auto& f = g.edges[j];
      if (e.u == f.u || e.u == f.v || e.v == f.u || e.v == f.v) continue;
      n += oracle_intersect(m.at(e.u), m.at(e.v), m.at(f.u), m.at(f.v));
    }
  return n;
}

// Plain BFS cell count of the shortest free path, -1 when none.
inline int oracle_bfs(int w, int h, const std::vector<char>& blocked, Cell s, Cell t) {
  std::vector<int> dist(static_cast<std::size_t>(w * h), -1);
  std::deque<Cell> q{s};
  dist[static_cast<std::size_t>(s.y * w + s.x)] = 1;
  while (!q.empty()) {
    Cell c = q.front();
    q.pop_front();
    if (c == t) return dist[static_cast<std::size_t>(c.y * w + c.x)];
    const Cell nb[4] = {{c.x + 1, c.y}, {c.x - 1, c.y}, {c.x, c.y + 1}, {c.x, c.y - 1}};
    for (Cell n : nb) {
      if (n.x < 0 || n.y < 0 || n.x >= w || n.y >= h) continue;
      const auto i = static_cast<std::size_t>(n.y * w + n.x);
      if (dist[i] >= 0 || (blocked[i] && !(n == t))) continue;
      dist[i] = dist[static_cast<std::size_t>(c.y * w + c.x)] + 1;
      q.push_back(n);
    }
  }
  return -1;
}

// Longest dependency chain by all-pairs scan over earlier gates.
inline int oracle_critical_path(const msfc::Circuit& c, int injection_cost) {
  const std::size_t n = c.gates.size();
  std::vector<int> finish(n, 0);
  int best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = c.gates[i];
    const bool barrier = g.kind == msfc::GateKind::Barrier;
    int before = 0;
    for (std::size_t j = 0; j < i; ++j) {
      const auto& h = c.gates[j];
      bool dep = barrier || h.kind == msfc::GateKind::Barrier;
      for (QubitId a : g.operands)
        for (QubitId b : h.operands) dep |= a == b;
      if (dep) before = std::max(before, finish[j]);
    }
    const bool inject = g.kind == msfc::GateKind::InjectT || g.kind == msfc::GateKind::InjectTdag;
    finish[i] = before + (inject ? injection_cost : 1);
    best = std::max(best, finish[i]);
  }
  return best;
}

// Smallest odd d in [3, 99] meeting d (100 eps)^((d+1)/2) <= budget, -1 if none.
inline int oracle_code_distance(double budget, double eps) {
  for (int d = 3; d <= 99; d += 2)
    if (d * std::pow(100.0 * eps, (d + 1) / 2.0) <= budget) return d;
  return -1;
}

// Minimum cut over splits with |w(A) - w(B)| <= max(tol * W, heaviest vertex).
inline std::int64_t oracle_min_balanced_cut(const msfc::WGraph& g, double tol) {
  const std::int64_t total = g.total_vweight();
  std::int64_t maxw = 0;
  for (auto w : g.vweight) maxw = std::max(maxw, w);
  const double slack = std::max(tol * static_cast<double>(total), static_cast<double>(maxw));
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::uint32_t mask = 0; mask < (1u << g.n); ++mask) {
    std::int64_t wa = 0;
    for (int v = 0; v < g.n; ++v)
      if (mask >> v & 1u) wa += g.vweight[static_cast<std::size_t>(v)];
    if (std::abs(static_cast<double>(2 * wa - total)) > slack) continue;
    std::int64_t cut = 0;
    for (int v = 0; v < g.n; ++v)
      for (int e = g.xadj[static_cast<std::size_t>(v)]; e < g.xadj[static_cast<std::size_t>(v) + 1]; ++e) {
        const int u = g.adj[static_cast<std::size_t>(e)];
        if (u > v && ((mask >> u & 1u) != (mask >> v & 1u))) cut += g.eweight[static_cast<std::size_t>(e)];
      }
    best = std::min(best, cut);
  }
  return best;
}

// Best legal total distance over every permutation of destinations.
inline double oracle_best_assignment(const msfc::PortProblem& p) {
  std::vector<int> perm(p.dst.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    bool ok = true;
    for (auto [s, d] : p.fixed) ok &= perm[static_cast<std::size_t>(s)] == d;
    std::set<std::pair<int, int>> used;
    for (std::size_t s = 0; s < p.src.size() && ok; ++s)
      ok = used.insert({p.src_module[s], p.dst_module[static_cast<std::size_t>(perm[s])]}).second;
    if (!ok) continue;
    double sum = 0.0;
    for (std::size_t s = 0; s < p.src.size(); ++s) sum += msfc::distance(p.src[s], p.dst[static_cast<std::size_t>(perm[s])]);
    best = std::min(best, sum);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Textbook two-pass Pearson coefficient.
inline double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace testing
