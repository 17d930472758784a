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
#include <string>
#include <utility>
#include <vector>

#include "msfc/anneal.hpp"
#include "msfc/bisect.hpp"
#include "msfc/layout.hpp"
#include "msfc/protocol.hpp"

namespace msfc {

enum class EmbedMethod { GP, FD };
enum class MidpointMode { None, ValiantRandom, Annealed };

const char* to_string(EmbedMethod m);
const char* to_string(MidpointMode m);
EmbedMethod parse_embed_method(const std::string& s);
MidpointMode parse_midpoint_mode(const std::string& s);

// Near-square grid holding n qubits with the given cells-per-qubit slack:
// height ceil(sqrt(n*ws)), width the fewest columns that fit.
std::pair<int, int> padded_dims(std::size_t n, double whitespace);

struct StitchParams {
  EmbedMethod method = EmbedMethod::GP;
  ReusePolicy reuse = ReusePolicy::Reuse;
  MidpointMode midpoints = MidpointMode::Annealed;
  double whitespace = 1.25;  // grid cells per qubit inside a fragment
  int fragment_gap = 0;
  int exact_port_limit = 400;
  int branch_node_limit = 2000;
  BisectOptions bisect;
  ForceParams fragment_force;
  ForceParams midpoint_force;
  // Simulated-latency polish of annealed midpoints; budget in cell-moves
  // (one evaluation costs moves x grid area). Zero disables it.
  double midpoint_refine_work = 3e8;
  std::uint64_t seed = 1;
};

// One module's embedding, in module-local coordinates.
struct Fragment {
  int width = 0;
  int height = 0;
  std::vector<Cell> raw;
  std::vector<Cell> anc;
  std::vector<Cell> out;
};

Fragment embed_module(int k, EmbedMethod method, const StitchParams& params);

struct RoundPlacement {
  int round = 1;
  std::vector<Cell> module_offset;  // top-left of each module's fragment
};

// Fragments of one round tiled ceil(sqrt(M)) per row.
struct RoundEmbedding {
  Fragment fragment;
  RoundPlacement placement;
  int width = 0;
  int height = 0;
};
RoundEmbedding embed_round(const Circuit& c, int round, EmbedMethod method, const StitchParams& params);

// Source ports and destination slots of one round boundary.
struct PortProblem {
  std::vector<Cell> src;
  std::vector<int> src_module;
  std::vector<Cell> dst;
  std::vector<int> dst_module;
  std::vector<std::pair<int, int>> fixed;  // (src index, dst index) pinned
};

// Destination index per source. Throws InfeasibleError when no assignment
// gives each destination module at most one state per source module.
std::vector<int> assign_ports(const PortProblem& p, int exact_limit = 400, int node_limit = 2000);
double assignment_distance(const PortProblem& p, const std::vector<int>& dst_of);
bool assignment_legal(const PortProblem& p, const std::vector<int>& dst_of);

struct PortAssignment {
  int round = 1;  // source round
  std::vector<WiringEdge> links;
  double total_distance = 0.0;
  double identity_distance = 0.0;
};

// Port problem for the boundary after round `round`, identity = the
// circuit's current wiring order.
PortProblem port_problem(const Circuit& c, const GridMapping& m, int round);
PortAssignment assign_ports(const Circuit& c, const GridMapping& m, int round, const StitchParams& params);

// Replaces the wiring and move gates of one boundary.
void rewire(Circuit& c, const PortAssignment& a);

struct StitchPlan {
  Circuit circuit;
  GridMapping mapping;
  std::vector<RoundEmbedding> rounds;
  std::vector<PortAssignment> ports;
  ReusePolicy reuse = ReusePolicy::Reuse;
  MidpointMode midpoint_mode = MidpointMode::None;
  std::vector<std::string> warnings;
};

// Midpoints for every move gate of the plan's circuit.
void optimize_midpoints(StitchPlan& plan, MidpointMode mode, const StitchParams& params);

// Local search on the midpoints of one boundary against simulated
// permutation-step latency. Returns the number of evaluations spent.
int refine_midpoints(StitchPlan& plan, int boundary, const StitchParams& params);

StitchPlan stitch_factory(const FactoryConfig& config, const StitchParams& params);

// Throws InvalidArgument when a StitchPlan invariant fails.
void check_plan(const StitchPlan& plan);

}  // namespace msfc
