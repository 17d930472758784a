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
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "msfc/error.hpp"
#include "msfc/harness.hpp"
#include "support.hpp"

using namespace msfc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Invariant violations seen by any simulation in this binary.
std::vector<std::string> g_violations;
int g_runs = 0;

void violation(const std::string& what) {
  if (g_violations.size() < 20) g_violations.push_back(what);
}

std::string trace_bytes(const SimReport& r) {
  std::ostringstream os;
  write_trace(os, r);
  return os.str();
}

// Simulates twice and records any broken simulator invariant.
SimReport checked_sim(const Circuit& c, const GridMapping& m, const std::string& tag) {
  SimOptions o;
  o.record_trace = true;
  o.record_paths = true;
  const SimReport a = simulate(c, m, o);
  const SimReport b = simulate(c, m, o);
  ++g_runs;
  if (a.latency < a.critical_path) violation(tag + ": latency below critical path");
  if (a.volume != a.area * a.latency) violation(tag + ": volume != area * latency");
  if (a.area != static_cast<std::int64_t>(m.width) * m.height) violation(tag + ": area != grid size");
  if (a.latency != b.latency || a.volume != b.volume || trace_bytes(a) != trace_bytes(b) ||
      a.round_latency != b.round_latency)
    violation(tag + ": repeated run differs");
  std::int64_t t = -1;
  std::set<Cell> used;
  for (const TraceRow& row : a.trace) {
    if (row.timestep != t) {
      t = row.timestep;
      used.clear();
    }
    if (row.stalled) continue;
    for (const Cell& cell : std::set<Cell>(row.path.begin(), row.path.end()))
      if (!used.insert(cell).second) {
        violation(tag + ": braids share a cell at timestep " + std::to_string(t));
        break;
      }
  }
  return a;
}

FactoryConfig factory(int k, int l, ReusePolicy p = ReusePolicy::NoReuse, std::uint64_t seed = 1) {
  FactoryConfig f;
  f.capacity_k = k;
  f.levels_l = l;
  f.reuse_policy = p;
  f.seed = seed;
  return f;
}

struct Run {
  std::int64_t latency = 0, area = 0, volume = 0, critical_path = 0;
};

std::map<std::tuple<int, int, int, int, std::uint64_t>, Run> g_cache;

Run run_one(Procedure p, int k, int l, ReusePolicy r = ReusePolicy::NoReuse, std::uint64_t seed = 1) {
  const auto key = std::make_tuple(static_cast<int>(p), k, l, static_cast<int>(r), seed);
  if (const auto it = g_cache.find(key); it != g_cache.end()) return it->second;
  const FactoryConfig f = factory(k, l, r, seed);
  const MappedFactory mf = map_factory(p, f, MethodParams{}, seed);
  const std::string tag = std::string(to_string(p)) + " k=" + std::to_string(k) + " l=" + std::to_string(l) + " " +
                          to_string(r) + " seed=" + std::to_string(seed);
  const SimReport s = checked_sim(mf.circuit, mf.mapping, tag);
  return g_cache[key] = Run{s.latency, s.area, s.volume, s.critical_path};
}

// Least volume over both reuse policies.
std::int64_t best_volume(Procedure p, int k, int l) {
  return std::min(run_one(p, k, l, ReusePolicy::Reuse).volume, run_one(p, k, l, ReusePolicy::NoReuse).volume);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome c1_single_level() {
  Outcome o;
  for (int k : {2, 4, 8}) {
    double best = 1e18;
    std::int64_t cp = 0;
    for (Procedure p : {Procedure::Line, Procedure::FD, Procedure::GP}) {
      const Run r = run_one(p, k, 1);
      best = std::min(best, static_cast<double>(r.latency));
      cp = r.critical_path;
    }
    const double ratio = best / static_cast<double>(cp);
    o.pass = o.pass && ratio <= 1.3;
    o.detail += "k=" + std::to_string(k) + " " + fmt("%.3f", ratio) + "x CP; ";
  }
  o.detail += "need <= 1.3";
  return o;
}

Outcome c2_random() {
  Outcome o;
  for (int k : {2, 4, 8}) {
    std::vector<std::int64_t> vols;
    for (std::uint64_t s = 1; s <= 5; ++s) vols.push_back(run_one(Procedure::Random, k, 1, ReusePolicy::NoReuse, s).volume);
    std::sort(vols.begin(), vols.end());
    std::int64_t best = INT64_MAX;
    for (Procedure p : {Procedure::Line, Procedure::FD, Procedure::GP}) best = std::min(best, run_one(p, k, 1).volume);
    const double ratio = static_cast<double>(vols[2]) / static_cast<double>(best);
    o.pass = o.pass && ratio >= 1.4;
    o.detail += "k=" + std::to_string(k) + " " + fmt("%.3f", ratio) + "; ";
  }
  o.detail += "need >= 1.4";
  return o;
}

Outcome c3_ordering() {
  Outcome o;
  for (int k : {4, 16}) {
    const std::int64_t hs = best_volume(Procedure::HS, k, 2);
    const std::int64_t gp = best_volume(Procedure::GP, k, 2);
    const std::int64_t fd = best_volume(Procedure::FD, k, 2);
    const std::int64_t line = best_volume(Procedure::Line, k, 2);
    o.pass = o.pass && hs < gp && gp < std::min(fd, line);
    o.detail += "k=" + std::to_string(k) + " HS " + std::to_string(hs) + " GP " + std::to_string(gp) + " FD " +
                std::to_string(fd) + " Line " + std::to_string(line) + "; ";
  }
  o.detail += "best of R/NR; need HS < GP < min(FD, Line)";
  return o;
}

Outcome c4_stitching_gain() {
  Outcome o;
  const double line = static_cast<double>(run_one(Procedure::Line, 16, 2).volume);
  const double hs = static_cast<double>(best_volume(Procedure::HS, 16, 2));
  o.pass = line / hs >= 1.2;
  o.detail = "Line(NR)/HS at k=16 l=2 = " + fmt("%.3f", line / hs) + "; need >= 1.2";
  return o;
}

Outcome c5_reuse() {
  Outcome o;
  for (Procedure p : {Procedure::GP, Procedure::Line})
    for (int k : {2, 4}) {
      const Run r = run_one(p, k, 2, ReusePolicy::Reuse);
      const Run n = run_one(p, k, 2, ReusePolicy::NoReuse);
      const bool ok = r.area <= n.area && r.latency >= n.latency && r.volume <= n.volume;
      o.pass = o.pass && ok;
      o.detail += std::string(to_string(p)) + " k=" + std::to_string(k) + " area " + std::to_string(r.area) + "/" +
                  std::to_string(n.area) + " lat " + std::to_string(r.latency) + "/" + std::to_string(n.latency) +
                  " vol " + std::to_string(r.volume) + "/" + std::to_string(n.volume) + (ok ? "" : " (fails)") +
                  "; ";
    }
  o.detail += "R/NR";
  return o;
}

Outcome c6_correlation() {
  const CorrelationStudy s = correlation_study(4, 1, 50, 1, MethodParams{});
  Outcome o;
  const double nan = std::nan("");
  const double rc = s.r_crossings.value_or(nan), rs = s.r_spacing.value_or(nan), rl = s.r_length.value_or(nan);
  o.pass = rc >= 0.5 && rs <= -0.3 && rl >= 0.3;
  o.detail = "r(crossings) " + fmt("%.3f", rc) + " >= 0.5, r(spacing) " + fmt("%.3f", rs) + " <= -0.3, r(length) " +
             fmt("%.3f", rl) + " >= 0.3";
  return o;
}

Outcome c7_midpoints() {
  const FactoryConfig f = factory(4, 2, ReusePolicy::NoReuse);
  std::int64_t lat[2];
  int i = 0;
  for (MidpointMode mode : {MidpointMode::None, MidpointMode::Annealed}) {
    StitchParams sp;
    sp.midpoints = mode;
    const StitchPlan plan = stitch_factory(f, sp);
    checked_sim(plan.circuit, plan.mapping, std::string("HS midpoints ") + to_string(mode));
    lat[i++] = permutation_latency(plan.circuit, plan.mapping, 1);
  }
  Outcome o;
  o.pass = static_cast<double>(lat[1]) <= static_cast<double>(lat[0]) / 1.15;
  o.detail = "permutation step None " + std::to_string(lat[0]) + " Annealed " + std::to_string(lat[1]) + " (" +
             fmt("%.3f", static_cast<double>(lat[0]) / static_cast<double>(lat[1])) + "x); need >= 1.15x";
  return o;
}

Outcome c8_oracles() {
  testing::Gen gen(8);
  int bad = 0;
  std::string detail;
  int crossing_bad = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = gen.uniform(2, 14), w = gen.uniform(4, 9), h = gen.uniform(4, 9);
    if (n > w * h) continue;
    const InteractionGraph g = gen.igraph(n, gen.uniform(1, 25));
    const GridMapping m = testing::mapping_of(gen.distinct_cells(n, w, h), w, h);
    crossing_bad += crossing_count(m, g) != testing::oracle_crossings(m, g);
  }
  int port_bad = 0;
  for (int i = 0; i < 200; ++i) {
    const int mods = gen.uniform(1, 4), per = gen.uniform(1, 4);
    if (mods * per > 8) continue;
    PortProblem p;
    const auto cells = gen.distinct_cells(2 * mods * per, 8, 8);
    for (int s = 0; s < mods * per; ++s) {
      p.src.push_back(cells[static_cast<std::size_t>(s)]);
      p.src_module.push_back(s / per);
      p.dst.push_back(cells[static_cast<std::size_t>(mods * per + s)]);
      p.dst_module.push_back(s / mods);
    }
    const double best = testing::oracle_best_assignment(p);
    const auto got = assign_ports(p);
    port_bad += !assignment_legal(p, got) || std::abs(assignment_distance(p, got) - best) > 1e-9 * std::max(1.0, best);
  }
  int cp_bad = 0;
  for (int i = 0; i < 200; ++i) {
    const Circuit c = gen.circuit(gen.uniform(1, 10), gen.uniform(0, 40));
    const int cost = gen.uniform(1, 3);
    cp_bad += critical_path(c, cost) != testing::oracle_critical_path(c, cost);
  }
  for (int k : {1, 2, 4})
    for (int l : {1, 2}) {
      const Circuit c = build_factory(factory(k, l));
      cp_bad += critical_path(c) != testing::oracle_critical_path(c, 2);
    }
  int d_bad = 0;
  for (int i = 0; i < 500; ++i) {
    const double eps = std::pow(10.0, gen.real(-7.0, -2.05));
    const double budget = std::pow(10.0, gen.real(-30.0, 0.0));
    const int want = testing::oracle_code_distance(budget, eps);
    try {
      d_bad += code_distance(budget, eps) != want;
    } catch (const InfeasibleError&) {
      d_bad += want >= 0;
    }
  }
  int fm_bad = 0;
  for (int i = 0; i < 300; ++i) {
    const WGraph g = gen.wgraph(gen.uniform(2, 10), gen.real(0.2, 0.9), 4);
    const Bisection b = bisect_graph(g);
    fm_bad += static_cast<double>(b.cut) > 1.5 * static_cast<double>(testing::oracle_min_balanced_cut(g, 0.1)) ||
              b.cut != cut_weight(g, b.side);
  }
  bad = crossing_bad + port_bad + cp_bad + d_bad + fm_bad;
  Outcome o;
  o.pass = bad == 0;
  o.detail = "mismatches: crossings " + std::to_string(crossing_bad) + ", ports " + std::to_string(port_bad) +
             ", critical path " + std::to_string(cp_bad) + ", code distance " + std::to_string(d_bad) + ", FM cut " +
             std::to_string(fm_bad) + "; need all 0";
  return o;
}

Outcome c9_invariants() {
  // Extra random runs on top of every run made by the other criteria.
  testing::Gen gen(9);
  for (int i = 0; i < 30; ++i) {
    const int n = gen.uniform(2, 12), w = gen.uniform(4, 8), h = gen.uniform(4, 8);
    if (n > w * h) continue;
    const Circuit c = gen.circuit(n, gen.uniform(1, 40));
    checked_sim(c, testing::mapping_of(gen.distinct_cells(n, w, h), w, h), "random circuit " + std::to_string(i));
  }
  Outcome o;
  o.pass = g_violations.empty();
  o.detail = std::to_string(g_runs) + " simulations, " + std::to_string(g_violations.size()) + " violations";
  for (const auto& v : g_violations) o.detail += "; " + v;
  return o;
}

Outcome c10_analytic() {
  Outcome o;
  int bad = 0;
  FactoryConfig f = factory(2, 2);
  f.eps_inject = 1e-3;
  const ErrorModel m = build_error_model(f);
  bad += std::abs(m.eps_by_round[0] / 7e-6 - 1.0) > 1e-9;
  bad += std::abs(m.eps_by_round[1] / 3.43e-10 - 1.0) > 1e-9;
  bad += std::abs(round_error(1e-3, 2) / 7e-6 - 1.0) > 1e-9;
  for (int k = 1; k <= 24; ++k) {
    try {
      success_probability(1.0 / (3 * k + 8), k);
      ++bad;
    } catch (const YieldThresholdError&) {
    }
    bad += !(success_probability(0.999 / (3 * k + 8), k) > 0.0);
    const Circuit c = build_module(k);
    int raw = 0, anc = 0, out = 0;
    for (const auto& q : c.qubits) {
      raw += q.role == Role::RawInput;
      anc += q.role == Role::Ancilla;
      out += q.role == Role::Output;
    }
    bad += raw != 3 * k + 8 || out != k || static_cast<int>(c.qubit_count()) != 5 * k + 13 || anc != k + 5;
    for (int l = 1; l <= 2; ++l) {
      if (k > 12 && l == 2) continue;
      const Circuit fc = build_factory(factory(k, l));
      std::int64_t expect = 0, data = 0;
      for (int r = 1; r <= l; ++r) expect += module_count(k, l, r) * (5 * k + 13);
      for (const auto& q : fc.qubits) data += q.role != Role::BarrierControl;
      bad += data != expect;
    }
  }
  o.pass = bad == 0;
  o.detail = "eps_1 " + fmt("%.3e", m.eps_by_round[0]) + ", eps_2 " + fmt("%.3e", m.eps_by_round[1]) +
             ", identity mismatches " + std::to_string(bad) + "; need 7e-6, 3.43e-10, 0";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {"1 single-level near-optimality", c1_single_level},
      {"2 random dominance", c2_random},
      {"3 two-level procedure ordering", c3_ordering},
      {"4 stitching gain", c4_stitching_gain},
      {"5 reuse tradeoff", c5_reuse},
      {"6 correlation signs", c6_correlation},
      {"7 midpoint gain", c7_midpoints},
      {"8 oracle equivalence", c8_oracles},
      {"9 simulator invariants", c9_invariants},
      {"10 analytic model", c10_analytic},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
