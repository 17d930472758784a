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

#include <cstdint>
#include <tuple>
#include <vector>

#include "msfc/igraph.hpp"
#include "msfc/layout.hpp"

namespace msfc {

// Undirected weighted graph in compressed adjacency form.
struct WGraph {
  int n = 0;
  std::vector<std::int64_t> vweight;
  std::vector<int> xadj{0};
  std::vector<int> adj;
  std::vector<std::int64_t> eweight;

  std::int64_t total_vweight() const;
  int edge_count() const { return static_cast<int>(adj.size() / 2); }
};

WGraph to_wgraph(const InteractionGraph& g);
// Edges as (u, v, w) with u < v; parallel edges are summed.
WGraph make_wgraph(int n, const std::vector<std::int64_t>& vweight,
                   std::vector<std::tuple<int, int, std::int64_t>> edges);

struct CoarseGraph {
  int level = 0;
  WGraph graph;
  // Finer-level vertex -> vertex of this level (empty at level 0).
  std::vector<int> projection;
};

// Instrumentation shared across one partitioning job.
struct BisectStats {
  std::int64_t work = 0;  // edge visits during coarsening and refinement
  int levels = 0;
  int rebalances = 0;
};

std::vector<CoarseGraph> coarsen(const WGraph& g, BisectStats* stats = nullptr);

struct Bisection {
  std::vector<std::uint8_t> side;  // 0 = A, 1 = B
  std::int64_t cut = 0;
  std::int64_t weight_a = 0;
  std::int64_t weight_b = 0;
  std::int64_t balance = 0;  // |w(A) - w(B)|
};

struct BisectOptions {
  double tolerance = 0.1;
  // Desired share of the total weight on side A.
  double target_fraction = 0.5;
  int max_passes = 8;
  // Hard weight caps per side; negative means none.
  std::int64_t cap_a = -1;
  std::int64_t cap_b = -1;
  // Growth seeds tried on the coarsest graph (heaviest vertices first).
  int initial_tries = 4;
};

std::int64_t cut_weight(const WGraph& g, const std::vector<std::uint8_t>& side);

Bisection bisect(const std::vector<CoarseGraph>& hierarchy, const BisectOptions& opts = {},
                 BisectStats* stats = nullptr);
Bisection bisect_graph(const WGraph& g, const BisectOptions& opts = {}, BisectStats* stats = nullptr);

// Refines `side` in place with FM passes; returns the resulting cut.
std::int64_t fm_refine(const WGraph& g, std::vector<std::uint8_t>& side, const BisectOptions& opts,
                       BisectStats* stats = nullptr);

// Recursive bisection of the graph matched by recursive bisection of the
// width x height rectangle. Only the qubits in `vertices` are placed (all
// when empty); the rest of the mapping stays unplaced.
GridMapping embed(const InteractionGraph& g, int width, int height, const BisectOptions& opts = {},
                  BisectStats* stats = nullptr, const std::vector<QubitId>& vertices = {});

}  // namespace msfc
