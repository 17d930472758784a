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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "msfc/types.hpp"

namespace msfc {

enum class ReusePolicy { Reuse, NoReuse };

enum class Role { RawInput, Ancilla, Output, BarrierControl };

enum class GateKind { Init, H, CNOT, CXX, InjectT, InjectTdag, MeasX, Barrier };

const char* to_string(ReusePolicy p);
const char* to_string(Role r);
const char* to_string(GateKind k);
ReusePolicy parse_reuse(const std::string& s);
Role parse_role(const std::string& s);
GateKind parse_gate_kind(const std::string& s);

// True for gates whose operands interact through a braid.
bool is_braid(GateKind k);

struct FactoryConfig {
  int capacity_k = 2;
  int levels_l = 1;
  double eps_inject = 1e-4;
  double target_error = 1e-15;
  ReusePolicy reuse_policy = ReusePolicy::NoReuse;
  std::uint64_t seed = 1;
  // Round r fabric protects budget_scale * eps_r.
  double budget_scale = 1.0;
};

// Throws InvalidArgument or YieldThresholdError.
void validate(const FactoryConfig& config);

struct QubitRef {
  QubitId id = kNoQubit;
  Role role = Role::RawInput;
  int round = 1;
  int module_index = 0;  // index within the round
  int port_index = 0;
};

struct Gate {
  GateKind kind = GateKind::H;
  std::vector<QubitId> operands;
  int round = 1;
  int module_index = -1;  // within the round; moves carry their destination, barriers and Init -1
  // Moves that carry an output state into the next round's input slot.
  bool permutation = false;
};

// Output `src_port` of round-r module `src_module` feeds input slot
// `dst_slot` of round-(r+1) module `dst_module`.
struct WiringEdge {
  int round = 1;
  int src_module = 0;
  int src_port = 0;
  int dst_module = 0;
  int dst_slot = 0;
};

struct ModuleInfo {
  int round = 1;
  int index = 0;
  std::vector<QubitId> raw;
  std::vector<QubitId> anc;
  std::vector<QubitId> out;
};

struct Circuit {
  int k = 0;
  int levels = 0;
  std::vector<QubitRef> qubits;  // qubits[i].id == i
  std::vector<Gate> gates;
  std::vector<std::size_t> round_boundaries;
  std::vector<WiringEdge> port_wiring;
  std::vector<ModuleInfo> modules;  // round-major

  std::size_t qubit_count() const { return qubits.size(); }
  int modules_in_round(int round) const;
  // Position of the first module of `round` in `modules`.
  int module_offset(int round) const;
  const ModuleInfo& module(int round, int index) const;
  QubitId barrier_control() const;
};

// Throws InvalidArgument on a broken registry, operand arity or wiring.
void check_circuit(const Circuit& c);

Circuit build_module(int k);
Circuit build_factory(const FactoryConfig& config);

// Modules in round r of an l-level factory: (3k+8)^(l-r) * k^(r-1).
std::int64_t module_count(int k, int levels, int round);

// Merges qubit q into alias[q] (alias[q] <= q). Merged qubits receive an
// Init right after the barrier that opens their round. Ids are compacted.
Circuit apply_reuse(const Circuit& fresh, const std::vector<QubitId>& alias);

// Reuse renaming used by build_factory: round-(r+1) module j takes the raw
// and ancilla tiles of round-r module j and places its outputs on the
// ancillas of round-r module M_{r+1}+j.
std::vector<QubitId> canonical_alias(const Circuit& fresh);

double round_error(double eps_in, int k);
double success_probability(double eps_in, int k);
int code_distance(double eps_budget, double eps_phys);

struct ErrorModel {
  std::vector<double> eps_by_round;
  std::vector<int> d_by_round;
  std::vector<double> success_by_round;
  std::vector<std::int64_t> groups_by_round;             // g_r
  std::vector<std::int64_t> modules_per_group_by_round;  // m_r
};

ErrorModel build_error_model(const FactoryConfig& config);
double round_area(const FactoryConfig& config, const ErrorModel& model, int r);

}  // namespace msfc
