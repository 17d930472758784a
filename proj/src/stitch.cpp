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
#include "msfc/stitch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include "msfc/error.hpp"
#include "msfc/igraph.hpp"
#include "msfc/meshsim.hpp"

namespace msfc {

const char* to_string(EmbedMethod m) { return m == EmbedMethod::GP ? "GP" : "FD"; }

const char* to_string(MidpointMode m) {
  switch (m) {
    case MidpointMode::None: return "None";
    case MidpointMode::ValiantRandom: return "ValiantRandom";
    case MidpointMode::Annealed: return "Annealed";
  }
  return "?";
}

EmbedMethod parse_embed_method(const std::string& s) {
  if (s == "GP") return EmbedMethod::GP;
  if (s == "FD") return EmbedMethod::FD;
  throw ParseError("unknown embedding method '" + s + "'");
}

MidpointMode parse_midpoint_mode(const std::string& s) {
  for (MidpointMode m : {MidpointMode::None, MidpointMode::ValiantRandom, MidpointMode::Annealed})
    if (s == to_string(m)) return m;
  throw ParseError("unknown midpoint mode '" + s + "'");
}

std::pair<int, int> padded_dims(std::size_t n, double whitespace) {
  if (!(whitespace >= 1.0)) throw InvalidArgument("whitespace must be at least 1");
  const double cells = std::max(1.0, static_cast<double>(n) * whitespace);
  const int h = std::max(1, static_cast<int>(std::ceil(std::sqrt(cells) - 1e-9)));
  const int w = std::max(1, static_cast<int>(std::ceil(cells / h - 1e-9)));
  return {w, h};
}

Fragment embed_module(int k, EmbedMethod method, const StitchParams& params) {
  const Circuit c = build_module(k);
  GridMapping m;
  if (method == EmbedMethod::GP) {
    const InteractionGraph g = from_circuit(c);
    const auto [w, h] = padded_dims(c.qubits.size(), params.whitespace);
    m = embed(g, w, h, params.bisect);
  } else {
    m = anneal(linear_mapping(c), c, params.fragment_force);
  }
  const ModuleInfo& mod = c.modules.front();
  Fragment f;
  f.width = m.width;
  f.height = m.height;
  for (QubitId q : mod.raw) f.raw.push_back(m.at(q));
  for (QubitId q : mod.anc) f.anc.push_back(m.at(q));
  for (QubitId q : mod.out) f.out.push_back(m.at(q));
  return f;
}

namespace {

RoundEmbedding tile(const Fragment& f, int round, int modules, int gap) {
  RoundEmbedding re;
  re.fragment = f;
  re.placement.round = round;
  const int cols = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(modules)) - 1e-9)));
  const int rows = (modules + cols - 1) / cols;
  for (int j = 0; j < modules; ++j)
    re.placement.module_offset.push_back({(j % cols) * (f.width + gap), (j / cols) * (f.height + gap)});
  const int used_cols = std::min(cols, modules);
  re.width = used_cols * f.width + (used_cols - 1) * gap;
  re.height = rows * f.height + (rows - 1) * gap;
  return re;
}

}  // namespace

RoundEmbedding embed_round(const Circuit& c, int round, EmbedMethod method, const StitchParams& params) {
  const int modules = c.modules_in_round(round);
  if (modules == 0) throw InvalidArgument("round " + std::to_string(round) + " has no modules");
  return tile(embed_module(c.k, method, params), round, modules, params.fragment_gap);
}

// ---------------------------------------------------------------------------
// Port assignment

double assignment_distance(const PortProblem& p, const std::vector<int>& dst_of) {
  double total = 0.0;
  for (std::size_t s = 0; s < dst_of.size(); ++s)
    total += distance(p.src[s], p.dst[static_cast<std::size_t>(dst_of[s])]);
  return total;
}

bool assignment_legal(const PortProblem& p, const std::vector<int>& dst_of) {
  if (dst_of.size() != p.src.size()) return false;
  std::vector<char> used(p.dst.size(), 0);
  std::set<std::pair<int, int>> pairs;
  for (std::size_t s = 0; s < dst_of.size(); ++s) {
    const int d = dst_of[s];
    if (d < 0 || static_cast<std::size_t>(d) >= p.dst.size() || used[static_cast<std::size_t>(d)]) return false;
    used[static_cast<std::size_t>(d)] = 1;
    if (!pairs.insert({p.src_module[s], p.dst_module[static_cast<std::size_t>(d)]}).second) return false;
  }
  for (auto [s, d] : p.fixed)
    if (dst_of[static_cast<std::size_t>(s)] != d) return false;
  return true;
}

namespace {

constexpr double kForbidden = 1e7;

// Min-cost perfect matching on a square matrix (row -> column).
std::vector<int> hungarian(const std::vector<double>& cost, int n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost[static_cast<std::size_t>(i0 - 1) * n + (j - 1)] - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) row[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return row;
}

// First (source module, destination module) pair fed twice, with the
// offending source indices.
bool first_violation(const PortProblem& p, const std::vector<int>& dst_of, int& dmod, std::vector<int>& srcs) {
  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (std::size_t s = 0; s < dst_of.size(); ++s)
    groups[{p.src_module[s], p.dst_module[static_cast<std::size_t>(dst_of[s])]}].push_back(static_cast<int>(s));
  for (auto& [key, list] : groups)
    if (list.size() > 1) {
      dmod = key.second;
      srcs = list;
      return true;
    }
  return false;
}

bool greedy_assign(const PortProblem& p, std::vector<int>& dst_of) {
  const std::size_t n = p.src.size();
  dst_of.assign(n, -1);
  std::vector<char> dst_used(p.dst.size(), 0);
  std::set<std::pair<int, int>> pairs;
  auto link = [&](std::size_t s, std::size_t d) {
    dst_of[s] = static_cast<int>(d);
    dst_used[d] = 1;
    pairs.insert({p.src_module[s], p.dst_module[d]});
  };
  for (auto [s, d] : p.fixed) link(static_cast<std::size_t>(s), static_cast<std::size_t>(d));
  std::vector<std::tuple<double, int, int>> order;
  order.reserve(n * p.dst.size());
  for (std::size_t s = 0; s < n; ++s) {
    if (dst_of[s] >= 0) continue;
    for (std::size_t d = 0; d < p.dst.size(); ++d)
      if (!dst_used[d]) order.emplace_back(distance(p.src[s], p.dst[d]), static_cast<int>(s), static_cast<int>(d));
  }
  std::sort(order.begin(), order.end());
  for (const auto& [dist, s, d] : order) {
    if (dst_of[static_cast<std::size_t>(s)] >= 0 || dst_used[static_cast<std::size_t>(d)]) continue;
    if (pairs.count({p.src_module[static_cast<std::size_t>(s)], p.dst_module[static_cast<std::size_t>(d)]})) continue;
    link(static_cast<std::size_t>(s), static_cast<std::size_t>(d));
  }
  std::vector<char> pinned(n, 0);
  for (auto [s, d] : p.fixed) pinned[static_cast<std::size_t>(s)] = 1;
  // Repair dead ends by swapping with an assigned source.
  for (std::size_t s = 0; s < n; ++s) {
    if (dst_of[s] >= 0) continue;
    bool placed = false;
    for (std::size_t d = 0; d < p.dst.size() && !placed; ++d) {
      if (dst_used[d]) continue;
      const int sm = p.src_module[s], dm = p.dst_module[d];
      if (!pairs.count({sm, dm})) {
        link(s, d);
        placed = true;
        break;
      }
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_s2 = n;
      for (std::size_t s2 = 0; s2 < n; ++s2) {
        if (dst_of[s2] < 0 || pinned[s2]) continue;
        const auto d2 = static_cast<std::size_t>(dst_of[s2]);
        const int sm2 = p.src_module[s2], dm2 = p.dst_module[d2];
        // After the swap: s -> d2 and s2 -> d.
        if (sm2 == sm || pairs.count({sm, dm2})) continue;
        if (dm != dm2 && pairs.count({sm2, dm})) continue;
        const double extra = distance(p.src[s], p.dst[d2]) + distance(p.src[s2], p.dst[d]) - distance(p.src[s2], p.dst[d2]);
        if (extra < best) {
          best = extra;
          best_s2 = s2;
        }
      }
      if (best_s2 < n) {
        const auto d2 = static_cast<std::size_t>(dst_of[best_s2]);
        pairs.erase({p.src_module[best_s2], p.dst_module[d2]});
        dst_of[best_s2] = -1;
        dst_used[d2] = 0;
        link(s, d2);
        link(best_s2, d);
        placed = true;
      }
    }
    if (!placed) return false;
  }
  return assignment_legal(p, dst_of);
}

}  // namespace

std::vector<int> assign_ports(const PortProblem& p, int exact_limit, int node_limit) {
  const std::size_t n = p.src.size();
  if (p.src_module.size() != n || p.dst.size() != p.dst_module.size())
    throw InvalidArgument("port problem arrays disagree in size");
  if (p.dst.size() != n) throw InfeasibleError("source ports and destination slots differ in number");
  if (n == 0) return {};
  std::vector<int> incumbent;
  double best = std::numeric_limits<double>::infinity();
  if (greedy_assign(p, incumbent)) best = assignment_distance(p, incumbent);
  if (static_cast<int>(n) > exact_limit) {
    if (incumbent.empty() || !assignment_legal(p, incumbent))
      throw InfeasibleError("no port assignment satisfies the one-state-per-source-module rule");
    return incumbent;
  }
  const int ni = static_cast<int>(n);
  std::vector<double> base(n * n);
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t d = 0; d < n; ++d) base[s * n + d] = distance(p.src[s], p.dst[d]);
  for (auto [s, d] : p.fixed)
    for (std::size_t o = 0; o < n; ++o) {
      if (o != static_cast<std::size_t>(d)) base[static_cast<std::size_t>(s) * n + o] = kForbidden;
      if (o != static_cast<std::size_t>(s)) base[o * n + static_cast<std::size_t>(d)] = kForbidden;
    }
  const double cube = static_cast<double>(n) * n * n;
  const int cap = std::max(8, std::min(node_limit, static_cast<int>(2e8 / cube)));
  struct Node {
    double bound;
    int order;
    std::vector<std::pair<int, int>> forbid;  // (source, destination module)
    bool operator>(const Node& o) const { return std::tie(bound, order) > std::tie(o.bound, o.order); }
  };
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;
  open.push({0.0, 0, {}});
  int created = 1;
  int expanded = 0;
  std::vector<double> cost;
  while (!open.empty() && expanded < cap) {
    Node node = open.top();
    open.pop();
    if (node.bound >= best - 1e-9) continue;
    ++expanded;
    cost = base;
    for (auto [s, dm] : node.forbid)
      for (std::size_t d = 0; d < n; ++d)
        if (p.dst_module[d] == dm) cost[static_cast<std::size_t>(s) * n + d] = kForbidden;
    const std::vector<int> sol = hungarian(cost, ni);
    double total = 0.0;
    bool forbidden = false;
    for (std::size_t s = 0; s < n; ++s) {
      const double c = cost[s * n + static_cast<std::size_t>(sol[s])];
      forbidden |= c >= kForbidden;
      total += c;
    }
    if (forbidden || total >= best - 1e-9) continue;
    int dm = 0;
    std::vector<int> srcs;
    if (!first_violation(p, sol, dm, srcs)) {
      best = total;
      incumbent = sol;
      continue;
    }
    for (int s : srcs) {
      Node child{total, created++, node.forbid};
      child.forbid.emplace_back(s, dm);
      open.push(std::move(child));
    }
  }
  if (incumbent.empty() || !assignment_legal(p, incumbent))
    throw InfeasibleError("no port assignment satisfies the one-state-per-source-module rule");
  return incumbent;
}

PortProblem port_problem(const Circuit& c, const GridMapping& m, int round) {
  PortProblem p;
  const int src_count = c.modules_in_round(round);
  const int dst_count = c.modules_in_round(round + 1);
  for (int sm = 0; sm < src_count; ++sm) {
    const ModuleInfo& mod = c.module(round, sm);
    for (QubitId q : mod.out) {
      p.src.push_back(m.at(q));
      p.src_module.push_back(sm);
    }
  }
  for (int dm = 0; dm < dst_count; ++dm) {
    const ModuleInfo& mod = c.module(round + 1, dm);
    for (QubitId q : mod.raw) {
      p.dst.push_back(m.at(q));
      p.dst_module.push_back(dm);
    }
  }
  return p;
}

PortAssignment assign_ports(const Circuit& c, const GridMapping& m, int round, const StitchParams& params) {
  const PortProblem p = port_problem(c, m, round);
  const int k = c.k;
  const int g = 3 * k + 8;
  std::vector<int> identity(p.src.size(), -1);
  for (const auto& w : c.port_wiring)
    if (w.round == round) identity[static_cast<std::size_t>(w.src_module * k + w.src_port)] = w.dst_module * g + w.dst_slot;
  if (std::find(identity.begin(), identity.end(), -1) != identity.end())
    throw InvalidArgument("circuit wiring does not cover every output of round " + std::to_string(round));
  std::vector<int> dst_of = assign_ports(p, params.exact_port_limit, params.branch_node_limit);
  PortAssignment a;
  a.round = round;
  a.identity_distance = assignment_distance(p, identity);
  a.total_distance = assignment_distance(p, dst_of);
  if (a.total_distance > a.identity_distance) {
    dst_of = identity;
    a.total_distance = a.identity_distance;
  }
  for (std::size_t s = 0; s < dst_of.size(); ++s) {
    WiringEdge w;
    w.round = round;
    w.src_module = static_cast<int>(s) / k;
    w.src_port = static_cast<int>(s) % k;
    w.dst_module = dst_of[s] / g;
    w.dst_slot = dst_of[s] % g;
    a.links.push_back(w);
  }
  std::sort(a.links.begin(), a.links.end(), [](const WiringEdge& x, const WiringEdge& y) {
    return std::tie(x.dst_module, x.dst_slot) < std::tie(y.dst_module, y.dst_slot);
  });
  return a;
}

void rewire(Circuit& c, const PortAssignment& a) {
  std::erase_if(c.port_wiring, [&](const WiringEdge& w) { return w.round == a.round; });
  std::size_t first = c.gates.size(), last = 0;
  for (std::size_t i = 0; i < c.gates.size(); ++i)
    if (c.gates[i].permutation && c.gates[i].round == a.round + 1) {
      first = std::min(first, i);
      last = i;
    }
  if (first == c.gates.size()) throw InvalidArgument("no moves follow round " + std::to_string(a.round));
  if (last - first + 1 != a.links.size()) throw InvalidArgument("assignment size does not match the move block");
  for (std::size_t i = 0; i < a.links.size(); ++i) {
    const WiringEdge& w = a.links[i];
    Gate& gate = c.gates[first + i];
    if (!gate.permutation) throw InvalidArgument("move block is not contiguous");
    gate.operands = {c.module(a.round, w.src_module).out[static_cast<std::size_t>(w.src_port)],
                     c.module(a.round + 1, w.dst_module).raw[static_cast<std::size_t>(w.dst_slot)]};
    gate.module_index = w.dst_module;
    c.port_wiring.push_back(w);
  }
  std::sort(c.port_wiring.begin(), c.port_wiring.end(), [](const WiringEdge& x, const WiringEdge& y) {
    return std::tie(x.round, x.dst_module, x.dst_slot) < std::tie(y.round, y.dst_module, y.dst_slot);
  });
}

// ---------------------------------------------------------------------------
// Midpoints

void optimize_midpoints(StitchPlan& plan, MidpointMode mode, const StitchParams& params) {
  GridMapping& m = plan.mapping;
  m.midpoints.clear();
  plan.midpoint_mode = mode;
  if (mode == MidpointMode::None) return;
  std::vector<std::pair<QubitId, QubitId>> moves;
  for (const Gate& g : plan.circuit.gates)
    if (g.permutation) moves.emplace_back(g.operands[0], g.operands[1]);
  if (moves.empty()) return;
  std::mt19937_64 rng(params.seed ^ 0x5eedULL);
  // Virtual graph: move endpoints (fixed) followed by one midpoint per move.
  std::vector<QubitId> ends;
  for (auto [a, b] : moves) {
    ends.push_back(a);
    ends.push_back(b);
  }
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
  const int ne = static_cast<int>(ends.size());
  auto local = [&](QubitId q) { return static_cast<int>(std::lower_bound(ends.begin(), ends.end(), q) - ends.begin()); };
  GridMapping vm;
  vm.width = m.width;
  vm.height = m.height;
  for (QubitId q : ends) vm.placement.push_back(m.at(q));
  std::vector<char> taken(static_cast<std::size_t>(m.area()), 0);
  for (const Cell c : vm.placement) taken[static_cast<std::size_t>(c.y) * m.width + c.x] = 1;
  for (auto [a, b] : moves) {
    const Cell ca = m.at(a), cb = m.at(b);
    const int x0 = std::min(ca.x, cb.x), x1 = std::max(ca.x, cb.x), y0 = std::min(ca.y, cb.y), y1 = std::max(ca.y, cb.y);
    std::uniform_int_distribution<int> dx(x0, x1), dy(y0, y1);
    Cell want{dx(rng), dy(rng)};
    if (mode == MidpointMode::ValiantRandom) {
      m.midpoints[{a, b}] = want;
      continue;
    }
    // The virtual graph must stay injective: nearest untaken cell, box first.
    Cell pick = want;
    double best = std::numeric_limits<double>::infinity();
    for (int y = 0; y < m.height; ++y)
      for (int x = 0; x < m.width; ++x) {
        if (taken[static_cast<std::size_t>(y) * m.width + x]) continue;
        const bool inside = x >= x0 && x <= x1 && y >= y0 && y <= y1;
        const double d = distance({x, y}, want) + (inside ? 0.0 : 1e6);
        if (d < best) {
          best = d;
          pick = {x, y};
        }
      }
    taken[static_cast<std::size_t>(pick.y) * m.width + pick.x] = 1;
    vm.placement.push_back(pick);
  }
  if (mode == MidpointMode::ValiantRandom) return;
  InteractionGraph vg;
  vg.vertex_count = static_cast<int>(vm.placement.size());
  TimestepLayer layer;
  layer.layer_index = 1;
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const int mid = ne + static_cast<int>(i);
    const int a = local(moves[i].first), b = local(moves[i].second);
    vg.edges.push_back(Edge{std::min(a, mid), std::max(a, mid), 1, {1}});
    vg.edges.push_back(Edge{std::min(b, mid), std::max(b, mid), 1, {1}});
    layer.edges.emplace_back(a, mid);
    layer.edges.emplace_back(mid, b);
  }
  std::sort(vg.edges.begin(), vg.edges.end(),
            [](const Edge& x, const Edge& y) { return std::tie(x.u, x.v) < std::tie(y.u, y.v); });
  const std::vector<TimestepLayer> ls{layer};
  AnnealInput in;
  in.graph = &vg;
  in.layers = &ls;
  in.movable.assign(vm.placement.size(), 0);
  for (std::size_t i = static_cast<std::size_t>(ne); i < vm.placement.size(); ++i) in.movable[i] = 1;
  ForceParams fp = params.midpoint_force;
  fp.community_kicks = false;
  const GridMapping out = anneal(vm, in, fp);
  for (std::size_t i = 0; i < moves.size(); ++i) m.midpoints[moves[i]] = out.placement[static_cast<std::size_t>(ne) + i];
  if (params.midpoint_refine_work > 0.0)
    for (int b = 1; b < plan.circuit.levels; ++b) refine_midpoints(plan, b, params);
}

int refine_midpoints(StitchPlan& plan, int boundary, const StitchParams& params) {
  GridMapping& m = plan.mapping;
  Circuit sub;
  sub.k = plan.circuit.k;
  sub.levels = plan.circuit.levels;
  sub.qubits = plan.circuit.qubits;
  for (const Gate& g : plan.circuit.gates)
    if (g.permutation && g.round == boundary + 1) sub.gates.push_back(g);
  if (sub.gates.empty()) return 0;
  const std::size_t n = sub.gates.size();
  const double unit = static_cast<double>(n) * static_cast<double>(m.area());
  int budget = static_cast<int>(std::min(1e6, params.midpoint_refine_work / unit));
  if (budget <= 0) return 0;
  std::vector<std::pair<QubitId, QubitId>> keys;
  for (const Gate& g : sub.gates) {
    keys.emplace_back(g.operands[0], g.operands[1]);
    if (!m.midpoints.count(keys.back())) m.midpoints[keys.back()] = m.at(g.operands[0]);
  }
  SimOptions opts;
  opts.record_trace = true;
  using Score = std::pair<std::int64_t, std::int64_t>;
  std::vector<int> critical;
  auto evaluate = [&](bool keep_critical) {
    const SimReport r = simulate(sub, m, opts);
    std::vector<std::int64_t> finish(n, 0);
    for (const TraceRow& row : r.trace)
      if (!row.stalled) finish[static_cast<std::size_t>(row.gate)] = row.timestep;
    if (keep_critical) {
      critical.clear();
      for (std::size_t i = 0; i < n; ++i)
        if (finish[i] == r.latency) critical.push_back(static_cast<int>(i));
    }
    return Score{r.latency, std::accumulate(finish.begin(), finish.end(), std::int64_t{0})};
  };
  Score best = evaluate(true);
  int spent = 1;
  // Start from the direct routes when the annealed hints lose to them.
  {
    std::vector<Cell> annealed;
    for (const auto& key : keys) {
      annealed.push_back(m.midpoints[key]);
      m.midpoints[key] = m.at(key.first);
    }
    const Score direct = evaluate(false);
    ++spent;
    if (direct < best) {
      best = evaluate(true);
      ++spent;
    } else {
      for (std::size_t i = 0; i < keys.size(); ++i) m.midpoints[keys[i]] = annealed[i];
    }
  }
  std::mt19937_64 rng(params.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(boundary)));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  while (spent < budget) {
    std::size_t i;
    if (!critical.empty() && coin(rng) < 0.7)
      i = static_cast<std::size_t>(critical[std::uniform_int_distribution<std::size_t>(0, critical.size() - 1)(rng)]);
    else
      i = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    const Cell a = m.at(keys[i].first), b = m.at(keys[i].second);
    Cell& mid = m.midpoints[keys[i]];
    const Cell old = mid;
    mid = {std::uniform_int_distribution<int>(std::min(a.x, b.x), std::max(a.x, b.x))(rng),
           std::uniform_int_distribution<int>(std::min(a.y, b.y), std::max(a.y, b.y))(rng)};
    if (mid == old) continue;
    ++spent;
    const Score s = evaluate(false);
    if (s < best) {
      best = evaluate(true);
      ++spent;
    } else {
      mid = old;
    }
  }
  return spent;
}

// ---------------------------------------------------------------------------
// Factory stitching

namespace {

struct Layout {
  int width = 0;
  int height = 0;
  std::vector<Cell> pos;        // by fresh qubit id
  std::vector<QubitId> holder;  // by cell: latest fresh qubit on the tile

  QubitId& at(Cell c) { return holder[static_cast<std::size_t>(c.y) * width + c.x]; }
  bool in(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }

  void grow(int w, int h) {
    if (w <= width && h <= height) return;
    std::vector<QubitId> next(static_cast<std::size_t>(std::max(w, width)) * std::max(h, height), kNoQubit);
    const int nw = std::max(w, width);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) next[static_cast<std::size_t>(y) * nw + x] = holder[static_cast<std::size_t>(y) * width + x];
    holder = std::move(next);
    width = nw;
    height = std::max(h, height);
  }

  void put(QubitId q, Cell c) {
    pos[static_cast<std::size_t>(q)] = c;
    at(c) = q;
  }
};

std::vector<std::pair<Cell, QubitId>> module_cells(const Fragment& f, const ModuleInfo& mod) {
  std::vector<std::pair<Cell, QubitId>> cells;
  for (std::size_t i = 0; i < mod.raw.size(); ++i) cells.emplace_back(f.raw[i], mod.raw[i]);
  for (std::size_t i = 0; i < mod.anc.size(); ++i) cells.emplace_back(f.anc[i], mod.anc[i]);
  for (std::size_t i = 0; i < mod.out.size(); ++i) cells.emplace_back(f.out[i], mod.out[i]);
  return cells;
}

void place_tiled(Layout& lay, const Circuit& c, const RoundEmbedding& re, Cell origin) {
  for (std::size_t j = 0; j < re.placement.module_offset.size(); ++j) {
    const ModuleInfo& mod = c.module(re.placement.round, static_cast<int>(j));
    const Cell off = re.placement.module_offset[j];
    for (auto [rel, q] : module_cells(re.fragment, mod))
      lay.put(q, {origin.x + off.x + rel.x, origin.y + off.y + rel.y});
  }
}

// Reuse placement of round r+1 over the tiles of finished qubits.
void place_reuse(Layout& lay, const Circuit& c, const RoundEmbedding& re, int round, std::vector<QubitId>& alias,
                 std::vector<std::string>& warnings) {
  const int next = round + 1;
  const Fragment& f = re.fragment;
  std::vector<char> blocked(lay.holder.size(), 0);
  auto idx = [&](Cell x) { return static_cast<std::size_t>(x.y) * lay.width + x.x; };
  auto refresh_blocked = [&] {
    blocked.assign(lay.holder.size(), 0);
    for (const auto& q : c.qubits) {
      const bool live = (q.role == Role::Output && q.round == round) || q.role == Role::BarrierControl;
      if (live) blocked[idx(lay.pos[static_cast<std::size_t>(q.id)])] = 1;
    }
  };
  refresh_blocked();
  int fx0 = INT32_MAX, fy0 = INT32_MAX, fx1 = INT32_MIN, fy1 = INT32_MIN;
  for (const auto* list : {&f.raw, &f.anc, &f.out})
    for (Cell x : *list) {
      fx0 = std::min(fx0, x.x);
      fy0 = std::min(fy0, x.y);
      fx1 = std::max(fx1, x.x);
      fy1 = std::max(fy1, x.y);
    }
  const int g = 3 * c.k + 8;
  const double penalty = 4.0 * (lay.width + lay.height);
  const int modules = c.modules_in_round(next);
  for (int j = 0; j < modules; ++j) {
    const ModuleInfo& mod = c.module(next, j);
    std::vector<Cell> src(static_cast<std::size_t>(g));
    for (const auto& w : c.port_wiring)
      if (w.round == round && w.dst_module == j)
        src[static_cast<std::size_t>(w.dst_slot)] = lay.pos[static_cast<std::size_t>(c.module(round, w.src_module).out[static_cast<std::size_t>(w.src_port)])];
    const auto cells = module_cells(f, mod);
    double best = std::numeric_limits<double>::infinity();
    Cell best_off{0, 0};
    for (int oy = -fy0; oy + fy1 < lay.height; ++oy)
      for (int ox = -fx0; ox + fx1 < lay.width; ++ox) {
        double score = 0.0;
        for (int s = 0; s < g; ++s)
          score += distance(src[static_cast<std::size_t>(s)], {ox + f.raw[static_cast<std::size_t>(s)].x, oy + f.raw[static_cast<std::size_t>(s)].y});
        for (auto [rel, q] : cells)
          if (blocked[idx({ox + rel.x, oy + rel.y})]) score += penalty;
        if (score < best) {
          best = score;
          best_off = {ox, oy};
        }
      }
    if (!std::isfinite(best)) best_off = {0, 0};
    std::vector<std::pair<Cell, QubitId>> displaced;
    for (auto [rel, q] : cells) {
      const Cell want{best_off.x + rel.x, best_off.y + rel.y};
      if (lay.in(want) && !blocked[idx(want)]) {
        const QubitId prev = lay.at(want);
        if (prev != kNoQubit) alias[static_cast<std::size_t>(q)] = prev;
        lay.put(q, want);
        blocked[idx(want)] = 1;
      } else {
        displaced.emplace_back(want, q);
      }
    }
    for (auto [want, q] : displaced) {
      Cell pick{-1, -1};
      double bd = std::numeric_limits<double>::infinity();
      for (int y = 0; y < lay.height; ++y)
        for (int x = 0; x < lay.width; ++x) {
          if (blocked[idx({x, y})]) continue;
          const double d = distance({x, y}, want);
          if (d < bd) {
            bd = d;
            pick = {x, y};
          }
        }
      if (pick.x < 0) {
        warnings.push_back("reuse placement ran out of tiles in round " + std::to_string(next) + "; grid expanded");
        const int old_h = lay.height;
        lay.grow(lay.width, lay.height + 1);
        blocked.resize(lay.holder.size(), 0);
        refresh_blocked();
        for (auto [rel2, q2] : cells)
          if (lay.pos[static_cast<std::size_t>(q2)] != kUnplaced && c.qubits[static_cast<std::size_t>(q2)].round == next)
            blocked[idx(lay.pos[static_cast<std::size_t>(q2)])] = 1;
        pick = {0, old_h};
        for (int x = 0; x < lay.width; ++x)
          if (!blocked[idx({x, old_h})]) {
            pick = {x, old_h};
            break;
          }
      }
      const QubitId prev = lay.at(pick);
      if (prev != kNoQubit) alias[static_cast<std::size_t>(q)] = prev;
      lay.put(q, pick);
      blocked[idx(pick)] = 1;
    }
  }
}

}  // namespace

StitchPlan stitch_factory(const FactoryConfig& config, const StitchParams& params) {
  validate(config);
  FactoryConfig fresh_cfg = config;
  fresh_cfg.reuse_policy = ReusePolicy::NoReuse;
  Circuit fresh = build_factory(fresh_cfg);
  const Fragment frag = embed_module(config.capacity_k, params.method, params);
  StitchPlan plan;
  plan.reuse = params.reuse;
  Layout lay;
  lay.pos.assign(fresh.qubits.size(), kUnplaced);
  std::vector<QubitId> alias(fresh.qubits.size());
  std::iota(alias.begin(), alias.end(), 0);
  for (int r = 1; r <= config.levels_l; ++r)
    plan.rounds.push_back(tile(frag, r, fresh.modules_in_round(r), params.fragment_gap));
  lay.grow(plan.rounds[0].width, plan.rounds[0].height);
  place_tiled(lay, fresh, plan.rounds[0], {0, 0});
  const QubitId control = fresh.barrier_control();
  if (control != kNoQubit) {
    Cell spot{-1, -1};
    for (int y = 0; y < lay.height && spot.x < 0; ++y)
      for (int x = 0; x < lay.width && spot.x < 0; ++x)
        if (lay.at({x, y}) == kNoQubit) spot = {x, y};
    if (spot.x < 0) {
      lay.grow(lay.width + 1, lay.height);
      spot = {lay.width - 1, 0};
    }
    lay.put(control, spot);
  }
  for (int r = 1; r < config.levels_l; ++r) {
    const RoundEmbedding& re = plan.rounds[static_cast<std::size_t>(r)];
    if (params.reuse == ReusePolicy::NoReuse) {
      const Cell origin{std::max(0, (lay.width - re.width) / 2), lay.height};
      lay.grow(std::max(lay.width, origin.x + re.width), lay.height + re.height);
      place_tiled(lay, fresh, re, origin);
    } else {
      place_reuse(lay, fresh, re, r, alias, plan.warnings);
    }
    GridMapping snapshot;
    snapshot.width = lay.width;
    snapshot.height = lay.height;
    snapshot.placement = lay.pos;
    for (Cell& x : snapshot.placement)
      if (x == kUnplaced) x = {0, 0};
    PortAssignment pa = assign_ports(fresh, snapshot, r, params);
    rewire(fresh, pa);
    plan.ports.push_back(std::move(pa));
  }
  plan.circuit = params.reuse == ReusePolicy::Reuse ? apply_reuse(fresh, alias) : fresh;
  // Merged qubits share their root's tile.
  plan.mapping.width = lay.width;
  plan.mapping.height = lay.height;
  plan.mapping.placement.clear();
  for (std::size_t q = 0; q < alias.size(); ++q)
    if (params.reuse == ReusePolicy::NoReuse || alias[q] == static_cast<QubitId>(q)) plan.mapping.placement.push_back(lay.pos[q]);
  optimize_midpoints(plan, params.midpoints, params);
  check_plan(plan);
  return plan;
}

void check_plan(const StitchPlan& plan) {
  check_circuit(plan.circuit);
  check_mapping(plan.mapping, plan.circuit.qubits.size());
  std::set<std::tuple<int, int, int>> wired;
  for (const auto& w : plan.circuit.port_wiring)
    if (!wired.insert({w.round, w.src_module, w.dst_module}).second)
      throw InvalidArgument("destination module fed twice by one source module");
  std::size_t moves = 0;
  for (const Gate& g : plan.circuit.gates) {
    if (!g.permutation) continue;
    ++moves;
    const auto it = std::find_if(plan.circuit.port_wiring.begin(), plan.circuit.port_wiring.end(), [&](const WiringEdge& w) {
      return w.round + 1 == g.round && plan.circuit.module(w.round, w.src_module).out[static_cast<std::size_t>(w.src_port)] == g.operands[0] &&
             plan.circuit.module(w.round + 1, w.dst_module).raw[static_cast<std::size_t>(w.dst_slot)] == g.operands[1];
    });
    if (it == plan.circuit.port_wiring.end()) throw InvalidArgument("move gate does not realize a wiring link");
  }
  if (moves != plan.circuit.port_wiring.size()) throw InvalidArgument("move count differs from wiring size");
}

}  // namespace msfc
