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
#include <vector>

#include "msfc/igraph.hpp"
#include "msfc/layout.hpp"
#include "msfc/protocol.hpp"

namespace msfc {

struct ForceParams {
  double attraction_gain = 1.0;
  double repulsion_gain = 1.0;
  double dipole_gain = 1.0;
  double w_len = 1.0;
  double w_space = 1.0;
  // Negative selects 2 x the initial average edge length.
  double w_cross = -1.0;
  int max_iters = 100;
  int convergence_window = 3;
  bool simulated_annealing = false;
  double temperature = 1.0;
  double cooling = 0.95;
  std::uint64_t seed = 1;
  double delta = 0.25;          // singularity guard, tiles
  double dipole_radius = 6.0;   // pole interaction cutoff, tiles
  double move_radius = 3.0;     // cone search radius, tiles
  bool swap_moves = false;
  bool community_kicks = true;
  // Proposals per iteration; 0 picks a budget from the edge count.
  int max_moves_per_iter = 0;
};

// Throws InvalidArgument on non-finite or negative values.
void check_params(const ForceParams& p);

struct ForceField {
  std::vector<Vec2> force;
};

struct AnnealStats {
  std::int64_t repulsion_pairs_last = 0;  // pairs visited by the last repulsion pass
  int iterations = 0;
  std::int64_t accepted = 0;
  int kicks = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
};

struct AnnealTraceRow {
  int iter = 0;
  double cost = 0.0;
  std::int64_t crossings = 0;
};

ForceField centroid_attraction(const GridMapping& m, const InteractionGraph& g, double gain = 1.0);
ForceField edge_repulsion(const GridMapping& m, const InteractionGraph& g, double gain = 1.0, double delta = 0.25,
                          std::int64_t* pairs = nullptr);
// Poles alternate along each layer path starting from its smallest qubit id.
ForceField dipole_rotation(const GridMapping& m, const std::vector<TimestepLayer>& layers, int vertex_count,
                           double gain = 1.0, double delta = 0.25, double radius = 6.0);
ForceField dipole_rotation(const GridMapping& m, const Circuit& c, double gain = 1.0, double delta = 0.25,
                           double radius = 6.0);

enum class KickMode { Separate, Gather };

// Only vertices flagged in `movable` (all when empty) are moved.
GridMapping community_kick(const GridMapping& m, const CommunityPartition& partition, KickMode mode,
                           std::uint64_t seed = 1, const std::vector<char>& movable = {});

// Spatial clusters: connected components under the gap threshold.
std::vector<int> spatial_clusters(const std::vector<Vec2>& points, double gap);

double mapping_cost(const GridMapping& m, const InteractionGraph& g, double w_len, double w_space, double w_cross);

struct AnnealInput {
  const InteractionGraph* graph = nullptr;
  const std::vector<TimestepLayer>* layers = nullptr;
  const CommunityPartition* partition = nullptr;  // optional
  std::vector<char> movable;                      // optional, by vertex
};

GridMapping anneal(const GridMapping& initial, const AnnealInput& in, const ForceParams& params,
                   AnnealStats* stats = nullptr, std::vector<AnnealTraceRow>* trace = nullptr);
GridMapping anneal(const GridMapping& initial, const Circuit& c, const ForceParams& params,
                   AnnealStats* stats = nullptr, std::vector<AnnealTraceRow>* trace = nullptr);

// CSV: iter,cost,crossings
void write_anneal_trace(std::ostream& os, const std::vector<AnnealTraceRow>& trace);

}  // namespace msfc
