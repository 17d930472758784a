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
#include "msfc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "msfc/error.hpp"

namespace msfc {

namespace {

constexpr std::int64_t kMaxQubits = 4'000'000;

struct Builder {
  Circuit c;

  QubitId add_qubit(Role role, int round, int module, int port) {
    QubitRef q;
    q.id = static_cast<QubitId>(c.qubits.size());
    q.role = role;
    q.round = round;
    q.module_index = module;
    q.port_index = port;
    c.qubits.push_back(q);
    return q.id;
  }

  void gate(GateKind kind, std::vector<QubitId> ops, int round, int module) {
    Gate g;
    g.kind = kind;
    g.operands = std::move(ops);
    g.round = round;
    g.module_index = module;
    c.gates.push_back(std::move(g));
  }

  ModuleInfo& add_module(int k, int round, int index) {
    ModuleInfo m;
    m.round = round;
    m.index = index;
    for (int i = 0; i < 3 * k + 8; ++i) m.raw.push_back(add_qubit(Role::RawInput, round, index, i));
    for (int i = 0; i < k + 5; ++i) m.anc.push_back(add_qubit(Role::Ancilla, round, index, i));
    for (int i = 0; i < k; ++i) m.out.push_back(add_qubit(Role::Output, round, index, i));
    c.modules.push_back(std::move(m));
    return c.modules.back();
  }

  // Gate order follows the reference listing line by line.
  void emit_module(int k, const ModuleInfo& m) {
    const auto& raw = m.raw;
    const auto& anc = m.anc;
    const auto& out = m.out;
    const int r = m.round;
    const int mi = m.index;
    gate(GateKind::H, {anc[0]}, r, mi);
    gate(GateKind::H, {anc[1]}, r, mi);
    gate(GateKind::H, {anc[2]}, r, mi);
    for (int i = 0; i < k; ++i) gate(GateKind::H, {out[i]}, r, mi);
    gate(GateKind::CNOT, {anc[1], anc[3]}, r, mi);
    gate(GateKind::CNOT, {anc[2], anc[4]}, r, mi);
    std::vector<QubitId> fan{anc[0]};
    for (int i = 1; i <= k; ++i) fan.push_back(anc[i]);
    gate(GateKind::CXX, fan, r, mi);
    for (int i = 0; i < k; ++i) {
      gate(GateKind::CNOT, {out[i], anc[5 + i]}, r, mi);
      gate(GateKind::InjectT, {raw[2 * i + 8 + i], anc[5 + i]}, r, mi);
      gate(GateKind::CNOT, {anc[5 + i], anc[4 + i]}, r, mi);
      gate(GateKind::CNOT, {anc[3 + i], anc[5 + i]}, r, mi);
      gate(GateKind::CNOT, {anc[4 + i], anc[3 + i]}, r, mi);
    }
    for (int i = 1; i < k + 5; ++i) gate(GateKind::InjectT, {raw[2 * i - 2], anc[i]}, r, mi);
    fan.assign(1, anc[0]);
    for (int i = 1; i <= k + 4; ++i) fan.push_back(anc[i]);
    gate(GateKind::CXX, fan, r, mi);
    for (int i = 1; i < k + 5; ++i) gate(GateKind::InjectTdag, {raw[2 * i - 1], anc[i]}, r, mi);
    for (QubitId a : anc) gate(GateKind::MeasX, {a}, r, mi);
  }
};

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t v = 1;
  for (int i = 0; i < e; ++i) {
    if (v > std::numeric_limits<std::int64_t>::max() / std::max<std::int64_t>(b, 1))
      throw InvalidArgument("factory too large");
    v *= b;
  }
  return v;
}

void recompute_boundaries(Circuit& c) {
  c.round_boundaries.clear();
  for (std::size_t i = 0; i < c.gates.size(); ++i)
    if (c.gates[i].kind == GateKind::Barrier) c.round_boundaries.push_back(i);
}

}  // namespace

const char* to_string(ReusePolicy p) { return p == ReusePolicy::Reuse ? "Reuse" : "NoReuse"; }

const char* to_string(Role r) {
  switch (r) {
    case Role::RawInput: return "RawInput";
    case Role::Ancilla: return "Ancilla";
    case Role::Output: return "Output";
    case Role::BarrierControl: return "BarrierControl";
  }
  return "?";
}

const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::Init: return "Init";
    case GateKind::H: return "H";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CXX: return "CXX";
    case GateKind::InjectT: return "InjectT";
    case GateKind::InjectTdag: return "InjectTdag";
    case GateKind::MeasX: return "MeasX";
    case GateKind::Barrier: return "Barrier";
  }
  return "?";
}

ReusePolicy parse_reuse(const std::string& s) {
  if (s == "Reuse" || s == "reuse" || s == "on" || s == "R") return ReusePolicy::Reuse;
  if (s == "NoReuse" || s == "noreuse" || s == "off" || s == "NR") return ReusePolicy::NoReuse;
  throw ParseError("unknown reuse policy '" + s + "'");
}

Role parse_role(const std::string& s) {
  for (Role r : {Role::RawInput, Role::Ancilla, Role::Output, Role::BarrierControl})
    if (s == to_string(r)) return r;
  throw ParseError("unknown qubit role '" + s + "'");
}

GateKind parse_gate_kind(const std::string& s) {
  for (GateKind k : {GateKind::Init, GateKind::H, GateKind::CNOT, GateKind::CXX, GateKind::InjectT,
                     GateKind::InjectTdag, GateKind::MeasX, GateKind::Barrier})
    if (s == to_string(k)) return k;
  throw ParseError("unknown gate kind '" + s + "'");
}

bool is_braid(GateKind k) {
  return k == GateKind::CNOT || k == GateKind::CXX || k == GateKind::InjectT || k == GateKind::InjectTdag;
}

void validate(const FactoryConfig& config) {
  if (config.capacity_k < 1) throw InvalidArgument("capacity_k must be >= 1");
  if (config.levels_l < 1) throw InvalidArgument("levels_l must be >= 1");
  if (!(config.eps_inject > 0.0 && config.eps_inject < 1.0))
    throw InvalidArgument("eps_inject must lie in (0,1)");
  if (!(config.target_error > 0.0 && config.target_error < 1.0))
    throw InvalidArgument("target_error must lie in (0,1)");
  if (!(config.budget_scale > 0.0)) throw InvalidArgument("budget_scale must be positive");
  if (!(config.eps_inject < 1.0 / (3.0 * config.capacity_k + 8.0)))
    throw YieldThresholdError("eps_inject must be below 1/(3k+8) for a positive success probability");
  std::int64_t modules = 0;
  for (int r = 1; r <= config.levels_l; ++r)
    modules += module_count(config.capacity_k, config.levels_l, r);
  if (modules * (5 * config.capacity_k + 13) > kMaxQubits) throw InvalidArgument("factory too large");
}

int Circuit::modules_in_round(int round) const {
  return static_cast<int>(std::count_if(modules.begin(), modules.end(),
                                        [round](const ModuleInfo& m) { return m.round == round; }));
}

int Circuit::module_offset(int round) const {
  for (std::size_t i = 0; i < modules.size(); ++i)
    if (modules[i].round == round) return static_cast<int>(i);
  throw InvalidArgument("no module in round " + std::to_string(round));
}

const ModuleInfo& Circuit::module(int round, int index) const {
  const int off = module_offset(round);
  if (index < 0 || index >= modules_in_round(round))
    throw InvalidArgument("module index out of range");
  return modules[static_cast<std::size_t>(off + index)];
}

QubitId Circuit::barrier_control() const {
  for (const auto& q : qubits)
    if (q.role == Role::BarrierControl) return q.id;
  return kNoQubit;
}

void check_circuit(const Circuit& c) {
  const auto n = static_cast<QubitId>(c.qubits.size());
  for (QubitId i = 0; i < n; ++i)
    if (c.qubits[static_cast<std::size_t>(i)].id != i) throw InvalidArgument("qubit registry ids not dense");
  std::vector<int> seen(static_cast<std::size_t>(n), -1);
  for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
    const Gate& g = c.gates[gi];
    for (QubitId q : g.operands) {
      if (q < 0 || q >= n) throw InvalidArgument("gate " + std::to_string(gi) + " references unknown qubit");
      if (seen[static_cast<std::size_t>(q)] == static_cast<int>(gi))
        throw InvalidArgument("gate " + std::to_string(gi) + " repeats an operand");
      seen[static_cast<std::size_t>(q)] = static_cast<int>(gi);
    }
    const std::size_t arity = g.operands.size();
    switch (g.kind) {
      case GateKind::CNOT:
      case GateKind::InjectT:
      case GateKind::InjectTdag:
        if (arity != 2) throw InvalidArgument("gate " + std::to_string(gi) + " needs 2 operands");
        break;
      case GateKind::CXX:
        if (arity < 2) throw InvalidArgument("CXX needs a control and at least one target");
        break;
      case GateKind::Barrier: {
        if (arity < 1) throw InvalidArgument("empty barrier");
        bool control = false;
        for (QubitId q : g.operands) control |= c.qubits[static_cast<std::size_t>(q)].role == Role::BarrierControl;
        if (!control) throw InvalidArgument("barrier lacks a control qubit");
        break;
      }
      default:
        if (arity != 1) throw InvalidArgument("single-qubit gate " + std::to_string(gi) + " has wrong arity");
    }
  }
  std::vector<std::pair<int, int>> pairs;
  for (const auto& w : c.port_wiring) pairs.emplace_back(w.round * 1'000'000 + w.src_module, w.dst_module);
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
    throw InvalidArgument("wiring feeds a destination twice from one source module");
}

std::int64_t module_count(int k, int levels, int round) {
  if (k < 1 || levels < 1 || round < 1 || round > levels) throw InvalidArgument("bad module_count arguments");
  return ipow(3 * k + 8, levels - round) * ipow(k, round - 1);
}

Circuit build_module(int k) {
  if (k < 1) throw InvalidArgument("build_module needs k >= 1");
  Builder b;
  b.c.k = k;
  b.c.levels = 1;
  b.add_module(k, 1, 0);
  const ModuleInfo m = b.c.modules.back();
  b.emit_module(k, m);
  return b.c;
}

Circuit build_factory(const FactoryConfig& config) {
  validate(config);
  const int k = config.capacity_k;
  const int levels = config.levels_l;
  const int g = 3 * k + 8;
  Builder b;
  b.c.k = k;
  b.c.levels = levels;
  std::vector<int> offset(static_cast<std::size_t>(levels + 2), 0);
  for (int r = 1; r <= levels; ++r) {
    const auto count = module_count(k, levels, r);
    offset[static_cast<std::size_t>(r)] = static_cast<int>(b.c.modules.size());
    for (std::int64_t j = 0; j < count; ++j) b.add_module(k, r, static_cast<int>(j));
  }
  QubitId control = kNoQubit;
  if (levels > 1) control = b.add_qubit(Role::BarrierControl, 1, 0, 0);

  auto mod = [&](int r, int j) -> const ModuleInfo& {
    return b.c.modules[static_cast<std::size_t>(offset[static_cast<std::size_t>(r)] + j)];
  };
  for (int r = 1; r <= levels; ++r) {
    const int count = static_cast<int>(module_count(k, levels, r));
    if (r > 1) {
      std::vector<QubitId> all(b.c.qubits.size());
      std::iota(all.begin(), all.end(), 0);
      b.gate(GateKind::Barrier, std::move(all), r - 1, -1);
      (void)control;
      // Group G of round r-1 (g modules) feeds modules G*k .. G*k+k-1 of round r.
      for (int j = 0; j < count; ++j) {
        const int group = j / k;
        const int port = j % k;
        for (int s = 0; s < g; ++s) {
          const int src = group * g + s;
          WiringEdge w;
          w.round = r - 1;
          w.src_module = src;
          w.src_port = port;
          w.dst_module = j;
          w.dst_slot = s;
          b.c.port_wiring.push_back(w);
          b.gate(GateKind::CNOT, {mod(r - 1, src).out[static_cast<std::size_t>(port)], mod(r, j).raw[static_cast<std::size_t>(s)]},
                 r, j);
          b.c.gates.back().permutation = true;
        }
      }
    }
    for (int j = 0; j < count; ++j) {
      const ModuleInfo m = mod(r, j);
      b.emit_module(k, m);
    }
  }
  recompute_boundaries(b.c);
  if (config.reuse_policy == ReusePolicy::Reuse && levels > 1) return apply_reuse(b.c, canonical_alias(b.c));
  return b.c;
}

std::vector<QubitId> canonical_alias(const Circuit& fresh) {
  std::vector<QubitId> alias(fresh.qubits.size());
  std::iota(alias.begin(), alias.end(), 0);
  for (int r = 1; r < fresh.levels; ++r) {
    const int next = fresh.modules_in_round(r + 1);
    for (int j = 0; j < next; ++j) {
      const ModuleInfo& dst = fresh.module(r + 1, j);
      const ModuleInfo& src = fresh.module(r, j);
      const ModuleInfo& spare = fresh.module(r, next + j);
      for (std::size_t i = 0; i < dst.raw.size(); ++i) alias[static_cast<std::size_t>(dst.raw[i])] = src.raw[i];
      for (std::size_t i = 0; i < dst.anc.size(); ++i) alias[static_cast<std::size_t>(dst.anc[i])] = src.anc[i];
      for (std::size_t i = 0; i < dst.out.size(); ++i) alias[static_cast<std::size_t>(dst.out[i])] = spare.anc[i];
    }
  }
  return alias;
}

Circuit apply_reuse(const Circuit& fresh, const std::vector<QubitId>& alias) {
  const std::size_t n = fresh.qubits.size();
  if (alias.size() != n) throw InvalidArgument("alias map size mismatch");
  std::vector<QubitId> root(n);
  for (std::size_t q = 0; q < n; ++q) {
    QubitId a = alias[q];
    if (a < 0 || static_cast<std::size_t>(a) > q) throw InvalidArgument("alias must point to an earlier qubit");
    root[q] = a == static_cast<QubitId>(q) ? a : root[static_cast<std::size_t>(a)];
  }
  std::vector<QubitId> renum(n, kNoQubit);
  Circuit out;
  out.k = fresh.k;
  out.levels = fresh.levels;
  for (std::size_t q = 0; q < n; ++q) {
    if (root[q] != static_cast<QubitId>(q)) continue;
    renum[q] = static_cast<QubitId>(out.qubits.size());
    QubitRef ref = fresh.qubits[q];
    ref.id = renum[q];
    out.qubits.push_back(ref);
  }
  auto map = [&](QubitId q) { return renum[static_cast<std::size_t>(root[static_cast<std::size_t>(q)])]; };
  for (const Gate& g : fresh.gates) {
    Gate h = g;
    for (QubitId& q : h.operands) q = map(q);
    if (g.kind == GateKind::Barrier) {
      std::sort(h.operands.begin(), h.operands.end());
      h.operands.erase(std::unique(h.operands.begin(), h.operands.end()), h.operands.end());
    }
    out.gates.push_back(std::move(h));
    if (g.kind != GateKind::Barrier) continue;
    const int next = g.round + 1;
    std::vector<QubitId> init;
    for (std::size_t q = 0; q < n; ++q)
      if (fresh.qubits[q].round == next && fresh.qubits[q].role != Role::BarrierControl &&
          root[q] != static_cast<QubitId>(q))
        init.push_back(map(static_cast<QubitId>(q)));
    std::sort(init.begin(), init.end());
    init.erase(std::unique(init.begin(), init.end()), init.end());
    for (QubitId q : init) {
      Gate ig;
      ig.kind = GateKind::Init;
      ig.operands = {q};
      ig.round = next;
      ig.module_index = -1;
      out.gates.push_back(std::move(ig));
    }
  }
  out.port_wiring = fresh.port_wiring;
  out.modules = fresh.modules;
  for (auto& m : out.modules) {
    for (auto& q : m.raw) q = map(q);
    for (auto& q : m.anc) q = map(q);
    for (auto& q : m.out) q = map(q);
  }
  recompute_boundaries(out);
  return out;
}

double round_error(double eps_in, int k) {
  if (!(eps_in >= 0.0 && eps_in < 1.0)) throw InvalidArgument("eps_in must lie in [0,1)");
  if (k < 1) throw InvalidArgument("k must be >= 1");
  return (1.0 + 3.0 * k) * eps_in * eps_in;
}

double success_probability(double eps_in, int k) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (!(eps_in >= 0.0)) throw InvalidArgument("eps_in must be non-negative");
  if (!(eps_in < 1.0 / (3.0 * k + 8.0)))
    throw YieldThresholdError("eps_in at or above 1/(3k+8): distillation never succeeds");
  return 1.0 - (3.0 * k + 8.0) * eps_in;
}

int code_distance(double eps_budget, double eps_phys) {
  if (!(eps_phys > 0.0 && eps_phys < 1e-2)) throw InvalidArgument("eps_phys must lie in (0, 1e-2)");
  if (!(eps_budget > 0.0)) throw InvalidArgument("eps_budget must be positive");
  for (int d = 3; d <= 99; d += 2)
    if (d * std::pow(100.0 * eps_phys, (d + 1) / 2) <= eps_budget) return d;
  throw InfeasibleError("no code distance up to 99 meets the error budget");
}

ErrorModel build_error_model(const FactoryConfig& config) {
  validate(config);
  const int k = config.capacity_k;
  ErrorModel m;
  double eps = config.eps_inject;
  for (int r = 1; r <= config.levels_l; ++r) {
    m.success_by_round.push_back(success_probability(eps, k));
    eps = round_error(eps, k);
    m.eps_by_round.push_back(eps);
    m.d_by_round.push_back(code_distance(config.budget_scale * eps, config.eps_inject));
    m.groups_by_round.push_back(3 * k + 8);
    m.modules_per_group_by_round.push_back(k);
  }
  return m;
}

double round_area(const FactoryConfig& config, const ErrorModel& model, int r) {
  if (r < 1 || r > config.levels_l || static_cast<std::size_t>(r) > model.d_by_round.size())
    throw InvalidArgument("round index out of range");
  const auto i = static_cast<std::size_t>(r - 1);
  const double m = static_cast<double>(model.modules_per_group_by_round[i]);
  const double g = static_cast<double>(model.groups_by_round[i]);
  const double d = model.d_by_round[i];
  return std::pow(m, r - 1) * std::pow(g, config.levels_l - r) * (5.0 * config.capacity_k + 13.0) * d * d;
}

}  // namespace msfc
