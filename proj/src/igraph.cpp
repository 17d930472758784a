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
#include "msfc/igraph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <unordered_map>

#include "msfc/error.hpp"

namespace msfc {

std::vector<std::vector<std::pair<int, int>>> InteractionGraph::adjacency() const {
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(vertex_count));
  for (const auto& e : edges) {
    adj[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.multiplicity);
    adj[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.multiplicity);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

std::int64_t InteractionGraph::total_weight() const {
  std::int64_t w = 0;
  for (const auto& e : edges) w += e.multiplicity;
  return w;
}

int gate_duration(const Gate& g, int injection_cost) {
  if (g.kind == GateKind::InjectT || g.kind == GateKind::InjectTdag) return std::max(1, injection_cost);
  return 1;
}

Schedule asap_schedule(const Circuit& c, int injection_cost) {
  Schedule s;
  s.start.resize(c.gates.size());
  s.finish.resize(c.gates.size());
  std::vector<int> ready(c.qubits.size(), 0);
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    int t = 0;
    for (QubitId q : g.operands) t = std::max(t, ready[static_cast<std::size_t>(q)]);
    s.start[i] = t + 1;
    s.finish[i] = t + gate_duration(g, injection_cost);
    for (QubitId q : g.operands) ready[static_cast<std::size_t>(q)] = s.finish[i];
    s.depth = std::max(s.depth, s.finish[i]);
  }
  return s;
}

InteractionGraph from_circuit(const Circuit& c, const GraphOptions& opts) {
  const Schedule s = asap_schedule(c, opts.injection_cost);
  std::map<std::pair<QubitId, QubitId>, std::size_t> index;
  InteractionGraph g;
  g.vertex_count = static_cast<int>(c.qubits.size());
  auto add = [&](QubitId a, QubitId b, int mult, int t) {
    if (a == b) return;
    auto key = std::minmax(a, b);
    auto [it, fresh] = index.emplace(key, g.edges.size());
    if (fresh) g.edges.push_back(Edge{key.first, key.second, 0, {}});
    Edge& e = g.edges[it->second];
    e.multiplicity += mult;
    e.timesteps.push_back(t);
  };
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& gate = c.gates[i];
    if (gate.permutation && !opts.include_permutation) continue;
    switch (gate.kind) {
      case GateKind::CNOT: add(gate.operands[0], gate.operands[1], 1, s.start[i]); break;
      case GateKind::CXX:
        for (std::size_t t = 1; t < gate.operands.size(); ++t) add(gate.operands[0], gate.operands[t], 1, s.start[i]);
        break;
      case GateKind::InjectT:
      case GateKind::InjectTdag:
        add(gate.operands[0], gate.operands[1], std::max(1, opts.injection_cost), s.start[i]);
        break;
      default: break;
    }
  }
  std::sort(g.edges.begin(), g.edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  return g;
}

InteractionGraph induced_subgraph(const InteractionGraph& g, const std::vector<QubitId>& vertices) {
  std::unordered_map<QubitId, int> local;
  for (std::size_t i = 0; i < vertices.size(); ++i) local.emplace(vertices[i], static_cast<int>(i));
  InteractionGraph sub;
  sub.vertex_count = static_cast<int>(vertices.size());
  for (const auto& e : g.edges) {
    auto a = local.find(e.u);
    auto b = local.find(e.v);
    if (a == local.end() || b == local.end()) continue;
    Edge f = e;
    f.u = std::min(a->second, b->second);
    f.v = std::max(a->second, b->second);
    sub.edges.push_back(std::move(f));
  }
  std::sort(sub.edges.begin(), sub.edges.end(),
            [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  return sub;
}

std::vector<TimestepLayer> layers(const Circuit& c, int injection_cost) {
  const Schedule s = asap_schedule(c, injection_cost);
  std::vector<TimestepLayer> out(static_cast<std::size_t>(s.depth));
  for (int i = 0; i < s.depth; ++i) out[static_cast<std::size_t>(i)].layer_index = i + 1;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    if (!is_braid(g.kind)) continue;
    for (int t = s.start[i]; t <= s.finish[i]; ++t) {
      auto& layer = out[static_cast<std::size_t>(t - 1)].edges;
      for (std::size_t j = 1; j < g.operands.size(); ++j) layer.emplace_back(g.operands[j - 1], g.operands[j]);
    }
  }
  return out;
}

int critical_path(const Circuit& c, int injection_cost) { return asap_schedule(c, injection_cost).depth; }

std::vector<int> module_labels(const Circuit& c) {
  std::vector<int> label(c.qubits.size(), -1);
  for (std::size_t m = 0; m < c.modules.size(); ++m) {
    const auto& mod = c.modules[m];
    for (const auto* list : {&mod.raw, &mod.anc, &mod.out})
      for (QubitId q : *list)
        if (label[static_cast<std::size_t>(q)] < 0) label[static_cast<std::size_t>(q)] = static_cast<int>(m);
  }
  int next = static_cast<int>(c.modules.size());
  for (auto& l : label)
    if (l < 0) l = next++;
  return label;
}

CommunityPartition normalize_labels(const std::vector<int>& raw) {
  CommunityPartition p;
  p.label.resize(raw.size());
  std::unordered_map<int, int> remap;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, fresh] = remap.emplace(raw[i], p.count);
    if (fresh) ++p.count;
    p.label[i] = it->second;
  }
  return p;
}

CommunityPartition communities(const InteractionGraph& g, const std::optional<std::vector<int>>& structural_hint,
                               std::uint64_t seed) {
  if (g.vertex_count <= 0) throw InvalidArgument("communities needs a nonempty graph");
  if (structural_hint) {
    if (structural_hint->size() != static_cast<std::size_t>(g.vertex_count))
      throw InvalidArgument("structural hint size mismatch");
    return normalize_labels(*structural_hint);
  }
  const auto adj = g.adjacency();
  std::vector<int> label(static_cast<std::size_t>(g.vertex_count));
  std::iota(label.begin(), label.end(), 0);
  std::vector<int> order(label);
  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> score(label.size(), 0);
  std::vector<int> touched;
  for (int iter = 0; iter < 100; ++iter) {
    std::shuffle(order.begin(), order.end(), rng);
    bool changed = false;
    for (int v : order) {
      const auto& nb = adj[static_cast<std::size_t>(v)];
      if (nb.empty()) continue;
      touched.clear();
      for (auto [u, w] : nb) {
        const int l = label[static_cast<std::size_t>(u)];
        if (score[static_cast<std::size_t>(l)] == 0) touched.push_back(l);
        score[static_cast<std::size_t>(l)] += w;
      }
      std::int64_t best = 0;
      for (int l : touched) best = std::max(best, score[static_cast<std::size_t>(l)]);
      std::vector<int> ties;
      for (int l : touched)
        if (score[static_cast<std::size_t>(l)] == best) ties.push_back(l);
      for (int l : touched) score[static_cast<std::size_t>(l)] = 0;
      std::sort(ties.begin(), ties.end());
      const int cur = label[static_cast<std::size_t>(v)];
      if (std::binary_search(ties.begin(), ties.end(), cur)) continue;
      label[static_cast<std::size_t>(v)] = ties[rng() % ties.size()];
      changed = true;
    }
    if (!changed) break;
  }
  return normalize_labels(label);
}

void write_edge_list(std::ostream& os, const InteractionGraph& g) {
  os << "vertices " << g.vertex_count << '\n';
  for (const auto& e : g.edges) {
    os << e.u << ' ' << e.v << ' ' << e.multiplicity << ' ';
    for (std::size_t i = 0; i < e.timesteps.size(); ++i) os << (i ? "," : "") << e.timesteps[i];
    os << '\n';
  }
}

}  // namespace msfc
