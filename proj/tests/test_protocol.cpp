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
#include <sstream>

#include "doctest.h"
#include "msfc/circuit_io.hpp"
#include "msfc/error.hpp"
#include "msfc/protocol.hpp"
#include "support.hpp"

using namespace msfc;

namespace {

std::map<Role, int> role_counts(const Circuit& c) {
  std::map<Role, int> n;
  for (const auto& q : c.qubits) ++n[q.role];
  return n;
}

std::string text(const Circuit& c) {
  std::ostringstream os;
  write_circuit(os, c);
  return os.str();
}

FactoryConfig factory(int k, int l, ReusePolicy p = ReusePolicy::NoReuse) {
  FactoryConfig f;
  f.capacity_k = k;
  f.levels_l = l;
  f.reuse_policy = p;
  return f;
}

}  // namespace

TEST_CASE("module registry sizes") {
  const Circuit c8 = build_module(8);
  auto n = role_counts(c8);
  CHECK(n[Role::RawInput] == 32);
  CHECK(n[Role::Ancilla] == 13);
  CHECK(n[Role::Output] == 8);
  CHECK(c8.qubit_count() == 53);

  const Circuit c1 = build_module(1);
  n = role_counts(c1);
  CHECK(n[Role::RawInput] == 11);
  CHECK(n[Role::Ancilla] == 6);
  CHECK(n[Role::Output] == 1);
  CHECK(c1.qubit_count() == 18);

  CHECK_THROWS_AS(build_module(0), InvalidArgument);
}

TEST_CASE("qubit-count identities for k in 1..24") {
  for (int k = 1; k <= 24; ++k) {
    const Circuit c = build_module(k);
    auto n = role_counts(c);
    CHECK(n[Role::RawInput] == 3 * k + 8);
    CHECK(n[Role::Ancilla] == k + 5);
    CHECK(n[Role::Output] == k);
    CHECK(static_cast<int>(c.qubit_count()) == 5 * k + 13);
    CHECK_NOTHROW(check_circuit(c));
  }
}

TEST_CASE("module gate list matches the hand-unrolled k=2 listing") {
  const Circuit c = build_module(2);
  const ModuleInfo& m = c.module(1, 0);
  auto r = [&](int i) { return m.raw[static_cast<std::size_t>(i)]; };
  auto a = [&](int i) { return m.anc[static_cast<std::size_t>(i)]; };
  auto o = [&](int i) { return m.out[static_cast<std::size_t>(i)]; };
  using K = GateKind;
  const std::vector<std::pair<K, std::vector<QubitId>>> expect = {
      {K::H, {a(0)}},
      {K::H, {a(1)}},
      {K::H, {a(2)}},
      {K::H, {o(0)}},
      {K::H, {o(1)}},
      {K::CNOT, {a(1), a(3)}},
      {K::CNOT, {a(2), a(4)}},
      {K::CXX, {a(0), a(1), a(2)}},
      {K::CNOT, {o(0), a(5)}},
      {K::InjectT, {r(8), a(5)}},
      {K::CNOT, {a(5), a(4)}},
      {K::CNOT, {a(3), a(5)}},
      {K::CNOT, {a(4), a(3)}},
      {K::CNOT, {o(1), a(6)}},
      {K::InjectT, {r(11), a(6)}},
      {K::CNOT, {a(6), a(5)}},
      {K::CNOT, {a(4), a(6)}},
      {K::CNOT, {a(5), a(4)}},
      {K::InjectT, {r(0), a(1)}},
      {K::InjectT, {r(2), a(2)}},
      {K::InjectT, {r(4), a(3)}},
      {K::InjectT, {r(6), a(4)}},
      {K::InjectT, {r(8), a(5)}},
      {K::InjectT, {r(10), a(6)}},
      {K::CXX, {a(0), a(1), a(2), a(3), a(4), a(5), a(6)}},
      {K::InjectTdag, {r(1), a(1)}},
      {K::InjectTdag, {r(3), a(2)}},
      {K::InjectTdag, {r(5), a(3)}},
      {K::InjectTdag, {r(7), a(4)}},
      {K::InjectTdag, {r(9), a(5)}},
      {K::InjectTdag, {r(11), a(6)}},
      {K::MeasX, {a(0)}},
      {K::MeasX, {a(1)}},
      {K::MeasX, {a(2)}},
      {K::MeasX, {a(3)}},
      {K::MeasX, {a(4)}},
      {K::MeasX, {a(5)}},
      {K::MeasX, {a(6)}},
  };
  REQUIRE(c.gates.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CAPTURE(i);
    CHECK(c.gates[i].kind == expect[i].first);
    CHECK(c.gates[i].operands == expect[i].second);
  }
}

TEST_CASE("module gate count for k=8") {
  // 3 + k Hadamards, 2 CNOTs, CXX, 5k tail, (k+4) T, CXX, (k+4) Tdag, k+5 measurements.
  CHECK(build_module(8).gates.size() == 11u + 2 + 1 + 40 + 12 + 1 + 12 + 13);
}

TEST_CASE("factory round structure") {
  SUBCASE("k=2 l=2") {
    const Circuit c = build_factory(factory(2, 2));
    CHECK(c.modules_in_round(1) == 14);
    CHECK(c.modules_in_round(2) == 2);
    int inputs = 0;
    for (const auto& q : c.qubits) inputs += q.role == Role::RawInput && q.round == 1;
    CHECK(inputs == 14 * 14);
    int outputs = 0;
    for (const auto& q : c.qubits) outputs += q.role == Role::Output && q.round == 2;
    CHECK(outputs == 4);
    CHECK(c.round_boundaries.size() == 1);
    CHECK(c.gates[c.round_boundaries[0]].kind == GateKind::Barrier);
  }
  SUBCASE("k=4 l=2") {
    const Circuit c = build_factory(factory(4, 2));
    CHECK(c.modules_in_round(1) == 20);
    CHECK(c.modules_in_round(2) == 4);
    int inputs = 0;
    for (const auto& q : c.qubits) inputs += q.role == Role::RawInput && q.round == 1;
    CHECK(inputs == 400);
    int outputs = 0;
    for (const auto& q : c.qubits) outputs += q.role == Role::Output && q.round == 2;
    CHECK(outputs == 16);
  }
  SUBCASE("single level equals the module") {
    const Circuit f = build_factory(factory(2, 1));
    CHECK(text(f) == text(build_module(2)));
    for (const auto& g : f.gates) CHECK(g.kind != GateKind::Barrier);
  }
}

TEST_CASE("module count recursion") {
  for (int k = 1; k <= 6; ++k)
    for (int l = 1; l <= 3; ++l)
      for (int r = 1; r <= l; ++r) {
        std::int64_t expect = 1;
        for (int i = 0; i < l - r; ++i) expect *= 3 * k + 8;
        for (int i = 0; i < r - 1; ++i) expect *= k;
        CHECK(module_count(k, l, r) == expect);
      }
}

TEST_CASE("wiring feeds each destination from distinct source modules") {
  for (int k = 1; k <= 6; ++k) {
    CAPTURE(k);
    const Circuit c = build_factory(factory(k, 2));
    std::map<int, std::set<int>> sources;
    std::map<int, int> fed;
    std::set<std::pair<int, int>> ports;
    for (const auto& w : c.port_wiring) {
      CHECK(sources[w.dst_module].insert(w.src_module).second);
      ++fed[w.dst_module];
      CHECK(ports.insert({w.src_module, w.src_port}).second);
    }
    CHECK(static_cast<int>(fed.size()) == c.modules_in_round(2));
    for (auto [d, n] : fed) CHECK(n == 3 * k + 8);
  }
}

TEST_CASE("every gate after a barrier belongs to the next round") {
  const Circuit c = build_factory(factory(2, 3));
  int round = 1;
  for (const auto& g : c.gates) {
    if (g.kind == GateKind::Barrier) {
      ++round;
      continue;
    }
    CHECK(g.round == round);
  }
  CHECK(round == 3);
}

TEST_CASE("factory construction is deterministic") {
  CHECK(text(build_factory(factory(3, 2))) == text(build_factory(factory(3, 2))));
  CHECK(text(build_factory(factory(2, 2, ReusePolicy::Reuse))) ==
        text(build_factory(factory(2, 2, ReusePolicy::Reuse))));
}

TEST_CASE("reuse shrinks the registry and stays valid") {
  for (int k : {1, 2, 4}) {
    const Circuit fresh = build_factory(factory(k, 2));
    const Circuit reused = build_factory(factory(k, 2, ReusePolicy::Reuse));
    CHECK_NOTHROW(check_circuit(reused));
    CHECK(reused.qubit_count() < fresh.qubit_count());
    CHECK(reused.modules.size() == fresh.modules.size());
    const auto alias = canonical_alias(fresh);
    for (std::size_t q = 0; q < alias.size(); ++q) CHECK(alias[q] <= static_cast<QubitId>(q));
  }
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(validate(factory(0, 1)), InvalidArgument);
  CHECK_THROWS_AS(validate(factory(1, 0)), InvalidArgument);
  FactoryConfig f = factory(2, 1);
  f.eps_inject = 1.0 / 14.0;
  CHECK_THROWS_AS(validate(f), YieldThresholdError);
  CHECK_THROWS_AS(build_factory(f), YieldThresholdError);
  f.eps_inject = 0.99 / 14.0;
  CHECK_NOTHROW(validate(f));
}

TEST_CASE("round error recursion") {
  CHECK(round_error(1e-3, 2) == doctest::Approx(7e-6).epsilon(1e-12));
  CHECK(round_error(0.0, 2) == 0.0);
  CHECK(round_error(round_error(1e-3, 2), 2) == doctest::Approx(3.43e-10).epsilon(1e-12));
}

TEST_CASE("success probability") {
  CHECK(success_probability(1e-3, 2) == doctest::Approx(0.986).epsilon(1e-12));
  CHECK(success_probability(0.0, 2) == 1.0);
  for (int k = 1; k <= 24; ++k) {
    CHECK_THROWS_AS(success_probability(1.0 / (3 * k + 8), k), YieldThresholdError);
    CHECK(success_probability(0.999 / (3 * k + 8), k) > 0.0);
  }
}

TEST_CASE("code distance examples") {
  CHECK(code_distance(1e-9, 1e-5) == 7);
  CHECK(code_distance(1.0, 1e-5) == 3);
  CHECK(code_distance(1e-15, 1e-4) == testing::oracle_code_distance(1e-15, 1e-4));
  CHECK_THROWS_AS(code_distance(1e-300, 9.9e-3), InfeasibleError);
}

TEST_CASE("code distance matches a linear scan") {
  testing::Gen gen(11);
  for (int i = 0; i < 500; ++i) {
    const double eps = std::pow(10.0, gen.real(-7.0, -2.05));
    const double budget = std::pow(10.0, gen.real(-30.0, 0.0));
    const int expect = testing::oracle_code_distance(budget, eps);
    CAPTURE(eps);
    CAPTURE(budget);
    if (expect < 0)
      CHECK_THROWS_AS(code_distance(budget, eps), InfeasibleError);
    else
      CHECK(code_distance(budget, eps) == expect);
  }
}

TEST_CASE("error model") {
  FactoryConfig f = factory(2, 2);
  f.eps_inject = 1e-3;
  const ErrorModel m = build_error_model(f);
  REQUIRE(m.eps_by_round.size() == 2);
  CHECK(m.eps_by_round[0] == doctest::Approx(7e-6).epsilon(1e-12));
  CHECK(m.eps_by_round[1] == doctest::Approx(3.43e-10).epsilon(1e-12));
  CHECK(m.d_by_round[0] == testing::oracle_code_distance(7e-6, 1e-3));
  CHECK(m.d_by_round[1] == testing::oracle_code_distance(3.43e-10, 1e-3));
  CHECK(m.d_by_round[0] < m.d_by_round[1]);
  CHECK(m.success_by_round[0] == doctest::Approx(0.986));
}

TEST_CASE("error rates fall and distances grow across rounds") {
  testing::Gen gen(5);
  for (int i = 0; i < 50; ++i) {
    FactoryConfig f = factory(gen.uniform(1, 8), gen.uniform(1, 3));
    f.eps_inject = std::pow(10.0, gen.real(-5.0, -3.0));
    CAPTURE(f.capacity_k);
    CAPTURE(f.eps_inject);
    ErrorModel m;
    try {
      m = build_error_model(f);
    } catch (const InfeasibleError&) {
      continue;
    }
    for (std::size_t r = 1; r < m.eps_by_round.size(); ++r) {
      CHECK(m.eps_by_round[r] < m.eps_by_round[r - 1]);
      CHECK(m.d_by_round[r] >= m.d_by_round[r - 1]);
    }
  }
}

TEST_CASE("round area") {
  FactoryConfig f = factory(2, 2);
  ErrorModel m;
  m.d_by_round = {5, 7};
  m.groups_by_round = {14, 14};
  m.modules_per_group_by_round = {2, 2};
  CHECK(round_area(f, m, 1) == doctest::Approx(8050.0));
  // Last round: k^(l-1) modules.
  CHECK(round_area(f, m, 2) == doctest::Approx(2.0 * 23 * 49));

  FactoryConfig one = factory(8, 1);
  ErrorModel m1;
  m1.d_by_round = {7};
  m1.groups_by_round = {32};
  m1.modules_per_group_by_round = {8};
  CHECK(round_area(one, m1, 1) == doctest::Approx(2597.0));
  CHECK_THROWS_AS(round_area(one, m1, 2), InvalidArgument);
}

TEST_CASE("round area equals module count times module tiles") {
  for (int k = 1; k <= 6; ++k)
    for (int l = 1; l <= 3; ++l) {
      FactoryConfig f = factory(k, l);
      f.eps_inject = 1e-4;
      const ErrorModel m = build_error_model(f);
      for (int r = 1; r <= l; ++r) {
        const double d = m.d_by_round[static_cast<std::size_t>(r - 1)];
        CHECK(round_area(f, m, r) ==
              doctest::Approx(static_cast<double>(module_count(k, l, r)) * (5 * k + 13) * d * d));
      }
    }
}

TEST_CASE("name round trips") {
  for (auto p : {ReusePolicy::Reuse, ReusePolicy::NoReuse}) CHECK(parse_reuse(to_string(p)) == p);
  for (auto r : {Role::RawInput, Role::Ancilla, Role::Output, Role::BarrierControl})
    CHECK(parse_role(to_string(r)) == r);
  for (auto k : {GateKind::Init, GateKind::H, GateKind::CNOT, GateKind::CXX, GateKind::InjectT,
                 GateKind::InjectTdag, GateKind::MeasX, GateKind::Barrier})
    CHECK(parse_gate_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_reuse("sometimes"), ParseError);
}

TEST_CASE("circuit text round trip") {
  for (auto p : {ReusePolicy::NoReuse, ReusePolicy::Reuse}) {
    const Circuit c = build_factory(factory(2, 2, p));
    std::istringstream is(text(c));
    const Circuit back = read_circuit(is);
    CHECK(text(back) == text(c));
    CHECK(back.port_wiring.size() == c.port_wiring.size());
    CHECK(back.round_boundaries == c.round_boundaries);
  }
  std::istringstream bad("msfc-circuit 1\nk 2\nlevels 1\nFROB 1 2\n");
  CHECK_THROWS_AS(read_circuit(bad), ParseError);
}
