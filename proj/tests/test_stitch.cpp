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
#include <map>
#include <set>

#include "doctest.h"
#include "msfc/error.hpp"
#include "msfc/harness.hpp"
#include "msfc/meshsim.hpp"
#include "msfc/stitch.hpp"
#include "support.hpp"

using namespace msfc;

namespace {

FactoryConfig factory(int k, int l, ReusePolicy p = ReusePolicy::Reuse) {
  FactoryConfig f;
  f.capacity_k = k;
  f.levels_l = l;
  f.reuse_policy = p;
  return f;
}

StitchParams params(ReusePolicy p, MidpointMode mode = MidpointMode::Annealed) {
  StitchParams s;
  s.reuse = p;
  s.midpoints = mode;
  return s;
}

// Random port problem: `modules` source modules with `per` ports each feeding
// destination modules that take one state from every source module.
PortProblem random_problem(testing::Gen& gen, int src_modules, int per, int w, int h) {
  PortProblem p;
  const int n = src_modules * per;
  const auto cells = gen.distinct_cells(2 * n, w, h);
  for (int s = 0; s < src_modules; ++s)
    for (int j = 0; j < per; ++j) {
      p.src.push_back(cells[static_cast<std::size_t>(s * per + j)]);
      p.src_module.push_back(s);
    }
  for (int d = 0; d < per; ++d)
    for (int j = 0; j < src_modules; ++j) {
      p.dst.push_back(cells[static_cast<std::size_t>(n + d * src_modules + j)]);
      p.dst_module.push_back(d);
    }
  return p;
}

std::vector<QubitId> module_qubits(const ModuleInfo& m) {
  std::vector<QubitId> q = m.raw;
  q.insert(q.end(), m.anc.begin(), m.anc.end());
  q.insert(q.end(), m.out.begin(), m.out.end());
  return q;
}

}  // namespace

TEST_CASE("grid dimensions for a qubit count") {
  for (std::size_t n = 1; n <= 300; n += 7)
    for (double ws : {1.0, 1.25, 1.6}) {
      const auto [w, h] = padded_dims(n, ws);
      CHECK(h == static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n) * ws))));
      CHECK(static_cast<double>(w) * h >= static_cast<double>(n) * ws - 1e-9);
      CHECK(static_cast<double>(w - 1) * h < static_cast<double>(n) * ws);
    }
}

TEST_CASE("round embedding replicates one fragment") {
  const Circuit c = build_factory(factory(2, 2, ReusePolicy::NoReuse));
  const RoundEmbedding r = embed_round(c, 1, EmbedMethod::GP, params(ReusePolicy::NoReuse));
  REQUIRE(r.placement.module_offset.size() == 14);
  CHECK(r.fragment.raw.size() == 14);
  CHECK(r.fragment.anc.size() == 7);
  CHECK(r.fragment.out.size() == 2);
  // Tiles never overlap and fit the round's box.
  for (std::size_t i = 0; i < 14; ++i) {
    const Cell a = r.placement.module_offset[i];
    CHECK(a.x + r.fragment.width <= r.width);
    CHECK(a.y + r.fragment.height <= r.height);
    for (std::size_t j = i + 1; j < 14; ++j) {
      const Cell b = r.placement.module_offset[j];
      const bool apart = a.x + r.fragment.width <= b.x || b.x + r.fragment.width <= a.x ||
                         a.y + r.fragment.height <= b.y || b.y + r.fragment.height <= a.y;
      CHECK(apart);
    }
  }
  // ceil(sqrt(14)) = 4 fragments per row.
  std::set<int> xs;
  for (const Cell& o : r.placement.module_offset) xs.insert(o.x);
  CHECK(xs.size() == 4);
}

TEST_CASE("single-module round equals the direct module embedding") {
  const Circuit c = build_factory(factory(2, 1));
  const StitchParams s = params(ReusePolicy::Reuse);
  const RoundEmbedding r = embed_round(c, 1, EmbedMethod::GP, s);
  const Fragment f = embed_module(2, EmbedMethod::GP, s);
  REQUIRE(r.placement.module_offset.size() == 1);
  CHECK(r.fragment.raw == f.raw);
  CHECK(r.fragment.anc == f.anc);
  CHECK(r.fragment.out == f.out);
}

TEST_CASE("replicated fragments share their intra-module edge length") {
  const StitchPlan plan = stitch_factory(factory(2, 2, ReusePolicy::NoReuse), params(ReusePolicy::NoReuse));
  const InteractionGraph g = from_circuit(plan.circuit);
  std::set<long long> lengths;
  for (int j = 0; j < plan.circuit.modules_in_round(1); ++j) {
    const auto qs = module_qubits(plan.circuit.module(1, j));
    GridMapping local;
    local.width = plan.mapping.width;
    local.height = plan.mapping.height;
    for (QubitId q : qs) local.placement.push_back(plan.mapping.at(q));
    const InteractionGraph sub = induced_subgraph(g, qs);
    lengths.insert(std::llround(edge_length(local, sub) * 1e9));
  }
  CHECK(lengths.size() == 1);
}

TEST_CASE("port assignment examples") {
  PortProblem one;
  one.src = {{0, 0}};
  one.src_module = {0};
  one.dst = {{3, 4}};
  one.dst_module = {0};
  CHECK(assign_ports(one) == std::vector<int>{0});
  CHECK(assignment_distance(one, {0}) == doctest::Approx(5.0));

  // Three source modules each feeding three distinct destination modules.
  PortProblem p;
  p.src = {{0, 0}, {0, 1}, {0, 2}};
  p.src_module = {0, 1, 2};
  p.dst = {{5, 2}, {5, 0}, {5, 1}};
  p.dst_module = {0, 1, 2};
  const auto got = assign_ports(p);
  CHECK(assignment_legal(p, got));
  CHECK(assignment_distance(p, got) == doctest::Approx(testing::oracle_best_assignment(p)));
  CHECK(got == std::vector<int>{1, 2, 0});
}

TEST_CASE("port assignment matches permutation enumeration up to 4x4") {
  testing::Gen gen(211);
  for (int trial = 0; trial < 200; ++trial) {
    const int mods = gen.uniform(1, 4), per = gen.uniform(1, 4);
    if (mods * per > 8) continue;
    PortProblem p = random_problem(gen, mods, per, 6, 6);
    if (gen.coin(0.3)) p.fixed.push_back({0, static_cast<int>(p.dst.size()) - 1});
    const double best = testing::oracle_best_assignment(p);
    CAPTURE(trial);
    if (!std::isfinite(best)) {
      CHECK_THROWS_AS(assign_ports(p), InfeasibleError);
      continue;
    }
    const auto got = assign_ports(p);
    CHECK(assignment_legal(p, got));
    for (auto [s, d] : p.fixed) CHECK(got[static_cast<std::size_t>(s)] == d);
    CHECK(assignment_distance(p, got) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("greedy and exact assignments stay legal on larger instances") {
  testing::Gen gen(223);
  for (int trial = 0; trial < 20; ++trial) {
    const PortProblem p = random_problem(gen, gen.uniform(4, 14), gen.uniform(1, 4), 20, 20);
    const auto exact = assign_ports(p);
    const auto greedy = assign_ports(p, 0);
    CHECK(assignment_legal(p, exact));
    CHECK(assignment_legal(p, greedy));
    CHECK(assignment_distance(p, exact) <= assignment_distance(p, greedy) + 1e-9);
  }
}

TEST_CASE("infeasible wiring is rejected") {
  PortProblem p;
  p.src = {{0, 0}, {1, 0}};
  p.src_module = {0, 0};
  p.dst = {{0, 1}, {1, 1}};
  p.dst_module = {0, 0};
  CHECK_THROWS_AS(assign_ports(p), InfeasibleError);
}

TEST_CASE("stitched plans keep their invariants") {
  for (auto policy : {ReusePolicy::Reuse, ReusePolicy::NoReuse})
    for (int k : {2, 3}) {
      CAPTURE(k);
      const StitchPlan plan = stitch_factory(factory(k, 2, policy), params(policy));
      CHECK_NOTHROW(check_plan(plan));
      CHECK_NOTHROW(check_mapping(plan.mapping, plan.circuit.qubit_count()));
      REQUIRE(plan.ports.size() == 1);
      const PortAssignment& a = plan.ports[0];
      CHECK(a.total_distance <= a.identity_distance + 1e-9);
      std::set<std::pair<int, int>> pairs;
      for (const auto& w : a.links) CHECK(pairs.insert({w.src_module, w.dst_module}).second);
      CHECK(static_cast<int>(a.links.size()) == plan.circuit.modules_in_round(2) * (3 * k + 8));

      // Each wiring edge is carried by one move from the output port to the input slot.
      std::set<std::pair<QubitId, QubitId>> moves;
      for (const Gate& g : plan.circuit.gates)
        if (g.permutation) moves.insert({g.operands[0], g.operands[1]});
      CHECK(moves.size() == plan.circuit.port_wiring.size());
      for (const auto& w : plan.circuit.port_wiring) {
        const QubitId from = plan.circuit.module(1, w.src_module).out[static_cast<std::size_t>(w.src_port)];
        const QubitId to = plan.circuit.module(2, w.dst_module).raw[static_cast<std::size_t>(w.dst_slot)];
        CHECK(moves.count({from, to}) == 1);
      }
      for (const auto& [edge, mid] : plan.mapping.midpoints) CHECK(plan.mapping.in_bounds(mid));

      // Live outputs are never recycled into the next round.
      std::set<QubitId> outputs;
      for (int j = 0; j < plan.circuit.modules_in_round(1); ++j)
        for (QubitId q : plan.circuit.module(1, j).out) outputs.insert(q);
      for (int j = 0; j < plan.circuit.modules_in_round(2); ++j)
        for (QubitId q : module_qubits(plan.circuit.module(2, j))) CHECK(outputs.count(q) == 0);
    }
}

TEST_CASE("reuse consumes less area") {
  const StitchPlan reuse = stitch_factory(factory(2, 2, ReusePolicy::Reuse), params(ReusePolicy::Reuse));
  const StitchPlan fresh = stitch_factory(factory(2, 2, ReusePolicy::NoReuse), params(ReusePolicy::NoReuse));
  CHECK(fresh.mapping.area() > reuse.mapping.area());
  CHECK(reuse.circuit.qubit_count() < fresh.circuit.qubit_count());
}

TEST_CASE("single-level stitching ignores the policy and equals GP") {
  const StitchPlan a = stitch_factory(factory(4, 1, ReusePolicy::Reuse), params(ReusePolicy::Reuse));
  const StitchPlan b = stitch_factory(factory(4, 1, ReusePolicy::NoReuse), params(ReusePolicy::NoReuse));
  CHECK(a.mapping.placement == b.mapping.placement);
  CHECK(a.mapping.width == b.mapping.width);
  CHECK(a.mapping.height == b.mapping.height);
  CHECK(a.mapping.midpoints.empty());

  MethodParams mp;
  const FactoryConfig f = factory(4, 1, ReusePolicy::NoReuse);
  const ResultRow gp = evaluate(map_factory(Procedure::GP, f, mp, 1), f, mp);
  const ResultRow hs = evaluate(map_factory(Procedure::HS, f, mp, 1), f, mp);
  CHECK(gp.latency == hs.latency);
  CHECK(gp.area == hs.area);
  CHECK(gp.volume == hs.volume);
}

TEST_CASE("a lone move gets its midpoint on the segment") {
  StitchPlan plan;
  plan.circuit.k = 1;
  plan.circuit.levels = 1;
  plan.circuit.qubits = {{0, Role::Output, 1, 0, 0}, {1, Role::RawInput, 2, 0, 0}};
  plan.circuit.gates.push_back({GateKind::CNOT, {0, 1}, 2, 0, true});
  plan.mapping = testing::mapping_of({{0, 0}, {4, 2}}, 5, 3);
  StitchParams s;
  s.midpoint_refine_work = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    s.seed = seed;
    optimize_midpoints(plan, MidpointMode::Annealed, s);
    REQUIRE(plan.mapping.midpoints.size() == 1);
    const Cell m = plan.mapping.midpoints.at({0, 1});
    CAPTURE(seed);
    // On the segment (0,0)-(4,2): 2y == x.
    CHECK(2 * m.y == m.x);
  }
  optimize_midpoints(plan, MidpointMode::None, s);
  CHECK(plan.mapping.midpoints.empty());
  optimize_midpoints(plan, MidpointMode::ValiantRandom, s);
  const Cell v = plan.mapping.midpoints.at({0, 1});
  CHECK((v.x >= 0 && v.x <= 4 && v.y >= 0 && v.y <= 2));
}

TEST_CASE("stitching is deterministic for a fixed seed") {
  StitchParams s = params(ReusePolicy::Reuse);
  s.seed = 7;
  const StitchPlan a = stitch_factory(factory(2, 2), s);
  const StitchPlan b = stitch_factory(factory(2, 2), s);
  CHECK(a.mapping.placement == b.mapping.placement);
  CHECK(a.mapping.midpoints == b.mapping.midpoints);
}

TEST_CASE("annealed midpoints do not slow the permutation step") {
  const FactoryConfig f = factory(2, 2);
  StitchPlan plan = stitch_factory(f, params(ReusePolicy::Reuse, MidpointMode::None));
  const std::int64_t none = permutation_latency(plan.circuit, plan.mapping, 1);
  optimize_midpoints(plan, MidpointMode::Annealed, params(ReusePolicy::Reuse));
  const std::int64_t annealed = permutation_latency(plan.circuit, plan.mapping, 1);
  CHECK(annealed <= none);
}

TEST_CASE("enum names round trip") {
  for (auto m : {EmbedMethod::GP, EmbedMethod::FD}) CHECK(parse_embed_method(to_string(m)) == m);
  for (auto m : {MidpointMode::None, MidpointMode::ValiantRandom, MidpointMode::Annealed})
    CHECK(parse_midpoint_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_midpoint_mode("Sideways"), ParseError);
}
