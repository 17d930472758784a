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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "msfc/igraph.hpp"
#include "msfc/protocol.hpp"
#include "msfc/types.hpp"

namespace msfc {

inline constexpr Cell kUnplaced{-1, -1};

struct GridMapping {
  int width = 0;
  int height = 0;
  std::vector<Cell> placement;  // by qubit id
  // Waypoint for the braid from the first qubit to the second.
  std::map<std::pair<QubitId, QubitId>, Cell> midpoints;

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  Cell at(QubitId q) const { return placement[static_cast<std::size_t>(q)]; }
  std::int64_t area() const { return static_cast<std::int64_t>(width) * height; }
  // Row-major grid of qubit ids, kNoQubit where empty.
  std::vector<QubitId> occupancy() const;
};

// Throws InvalidArgument unless the mapping is total over `qubit_count`
// qubits, injective and in bounds, with in-bounds midpoints.
void check_mapping(const GridMapping& m, std::size_t qubit_count);

// Shifts every cell so the bounding box starts at (margin, margin) and
// shrinks the grid to fit.
void tighten(GridMapping& m, int margin);

struct MetricReport {
  double avg_edge_length = 0.0;
  double avg_edge_spacing = 0.0;
  std::int64_t crossing_count = 0;
};

GridMapping linear_mapping(const Circuit& c);
GridMapping random_mapping(const Circuit& c, int width, int height, std::uint64_t seed);
GridMapping random_mapping(std::size_t qubit_count, int width, int height, std::uint64_t seed);

// Averages weight each edge by its multiplicity.
double edge_length(const GridMapping& m, const InteractionGraph& g);
double edge_spacing(const GridMapping& m, const InteractionGraph& g);
std::int64_t crossing_count(const GridMapping& m, const InteractionGraph& g);
MetricReport metrics(const GridMapping& m, const InteractionGraph& g);

// Closed-segment intersection on integer points; collinear overlap counts.
bool segments_intersect(Cell a, Cell b, Cell c, Cell d);

// `grid W H`, then `qubit_id x y` lines and `mid u v x y` lines. With a
// circuit, qubits are grouped under `round R` markers.
void write_mapping(std::ostream& os, const GridMapping& m, const Circuit* c = nullptr);
GridMapping read_mapping(std::istream& is);
void save_mapping(const std::string& path, const GridMapping& m, const Circuit* c = nullptr);
GridMapping load_mapping(const std::string& path);

}  // namespace msfc
