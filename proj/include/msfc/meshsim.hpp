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
#include <string>
#include <vector>

#include "msfc/layout.hpp"
#include "msfc/protocol.hpp"

namespace msfc {

// Per-timestep cell reservations plus a shortest-path router over the free
// cells. Qubit tiles are passable unless reserved in the current timestep.
class Router {
 public:
  Router(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

  // Releases every reservation.
  void next_timestep();
  bool occupied(Cell c) const;
  // Throws Error if the cell is already reserved this timestep. New
  // reservations stay pending until commit() or rollback(); pending cells
  // stay passable for the braid that holds them.
  void reserve(Cell c);
  bool pending(Cell c) const;
  void commit();
  void rollback();

  // Shortest 4-connected path src..dst (inclusive) through unreserved cells.
  // The endpoints themselves are always admitted. Neighbor order E,S,W,N.
  bool route(Cell src, Cell dst, std::vector<Cell>& path);

  // Node expansions since construction.
  std::int64_t expansions() const { return expansions_; }

 private:
  int index(Cell c) const { return c.y * width_ + c.x; }

  int width_;
  int height_;
  std::uint32_t stamp_ = 1;
  std::vector<std::uint32_t> busy_;
  std::uint32_t search_ = 0;
  std::vector<std::uint32_t> seen_;
  std::vector<int> dist_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> buckets_;
  std::uint32_t fail_id_ = 0;
  std::uint32_t fail_floor_ = 1;
  std::vector<std::uint32_t> fail_mark_;
  std::vector<int> pending_;
  std::uint32_t owner_ = 1;
  std::vector<std::uint32_t> own_;
  std::vector<int> visited_;
  std::int64_t expansions_ = 0;
};

enum class InjectionMode { Expected, Optimistic, Geometric };
const char* to_string(InjectionMode m);
InjectionMode parse_injection_mode(const std::string& s);

struct SimOptions {
  int injection_cost = 2;
  InjectionMode injection_mode = InjectionMode::Expected;
  std::uint64_t seed = 1;
  bool use_midpoints = true;
  bool record_trace = false;
  bool record_paths = false;
  // Cells reserved in every timestep (congestion experiments).
  std::vector<Cell> blocked;
};

struct TraceRow {
  std::int64_t timestep = 0;
  std::int64_t gate = 0;
  GateKind kind = GateKind::H;
  int path_length = 0;
  bool stalled = false;
  std::vector<Cell> path;  // only with record_paths
};

struct SimReport {
  std::int64_t latency = 0;
  std::int64_t stalls = 0;
  int width = 0;
  int height = 0;
  std::int64_t area = 0;
  std::int64_t volume = 0;
  int critical_path = 0;
  std::vector<std::int64_t> barrier_timesteps;
  std::vector<std::int64_t> round_latency;
  bool has_physical = false;
  double physical_volume = 0.0;
  std::vector<TraceRow> trace;
};

SimReport simulate(const Circuit& c, const GridMapping& m, const SimOptions& opts = {});

// Fills physical_volume = sum_r round_area(r) * round_latency[r].
void attach_physical(SimReport& report, const FactoryConfig& config, const ErrorModel& model);

// Latency of the move gates feeding round `boundary + 1`, run in isolation.
std::int64_t permutation_latency(const Circuit& c, const GridMapping& m, int boundary, const SimOptions& opts = {});

// CSV: timestep,gate,kind,path_length,stalled
void write_trace(std::ostream& os, const SimReport& r);

}  // namespace msfc
