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
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "msfc/protocol.hpp"

namespace msfc {

struct GraphOptions {
  // Braids per injection: 2 is the expected cost, 1 the optimistic one.
  int injection_cost = 2;
  bool include_permutation = true;
};

struct Edge {
  QubitId u = 0;  // u < v
  QubitId v = 0;
  int multiplicity = 0;
  std::vector<int> timesteps;  // ASAP start layer of each inducing gate
};

struct InteractionGraph {
  int vertex_count = 0;
  std::vector<Edge> edges;
  std::vector<int> community;  // optional, empty when unset

  // Neighbor lists as (vertex, summed multiplicity), sorted by vertex.
  std::vector<std::vector<std::pair<int, int>>> adjacency() const;
  std::int64_t total_weight() const;
};

InteractionGraph from_circuit(const Circuit& c, const GraphOptions& opts = {});

// Induced subgraph over `vertices` (renumbered in the given order).
InteractionGraph induced_subgraph(const InteractionGraph& g, const std::vector<QubitId>& vertices);

// Duration of a gate in timesteps.
int gate_duration(const Gate& g, int injection_cost);

// ASAP schedule: start[g] = 1 + max finish of earlier gates sharing a qubit.
struct Schedule {
  std::vector<int> start;
  std::vector<int> finish;
  int depth = 0;
};
Schedule asap_schedule(const Circuit& c, int injection_cost = 2);

struct TimestepLayer {
  int layer_index = 0;
  // Each gate contributes a path (CXX: control, t1, t2, ...), so edges in a
  // layer form disjoint paths.
  std::vector<std::pair<QubitId, QubitId>> edges;
};

std::vector<TimestepLayer> layers(const Circuit& c, int injection_cost = 2);
int critical_path(const Circuit& c, int injection_cost = 2);

struct CommunityPartition {
  std::vector<int> label;
  int count = 0;
};

// Global module index of the first module using each qubit; qubits outside
// every module get fresh labels.
std::vector<int> module_labels(const Circuit& c);

CommunityPartition communities(const InteractionGraph& g, const std::optional<std::vector<int>>& structural_hint,
                               std::uint64_t seed = 1);

// Relabels to contiguous ids in order of first appearance.
CommunityPartition normalize_labels(const std::vector<int>& raw);

// `u v multiplicity t1,t2,...` per line after a `vertices N` header.
void write_edge_list(std::ostream& os, const InteractionGraph& g);

}  // namespace msfc
