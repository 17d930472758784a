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
#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "msfc/error.hpp"
#include "msfc/layout.hpp"
#include "support.hpp"

using namespace msfc;

namespace {

InteractionGraph graph(int n, std::vector<std::pair<int, int>> edges) {
  InteractionGraph g;
  g.vertex_count = n;
  for (auto [u, v] : edges) g.edges.push_back({u, v, 1, {1}});
  return g;
}

double oracle_spacing(const GridMapping& m, const InteractionGraph& g) {
  double sum = 0.0, w = 0.0;
  for (std::size_t i = 0; i < g.edges.size(); ++i)
    for (std::size_t j = i + 1; j < g.edges.size(); ++j) {
      const auto& e = g.edges[i];
      const auto& f = g.edges[j];
      const double ex = (m.at(e.u).x + m.at(e.v).x) / 2.0, ey = (m.at(e.u).y + m.at(e.v).y) / 2.0;
      const double fx = (m.at(f.u).x + m.at(f.v).x) / 2.0, fy = (m.at(f.u).y + m.at(f.v).y) / 2.0;
      const double ww = static_cast<double>(e.multiplicity) * f.multiplicity;
      sum += ww * std::sqrt((ex - fx) * (ex - fx) + (ey - fy) * (ey - fy));
      w += ww;
    }
  return sum / w;
}

FactoryConfig factory(int k, int l) {
  FactoryConfig f;
  f.capacity_k = k;
  f.levels_l = l;
  return f;
}

}  // namespace

TEST_CASE("edge length examples") {
  const InteractionGraph one = graph(2, {{0, 1}});
  CHECK(edge_length(testing::mapping_of({{0, 0}, {3, 4}}, 4, 5), one) == doctest::Approx(5.0));
  CHECK(edge_length(testing::mapping_of({{0, 0}, {1, 0}}, 2, 1), one) == doctest::Approx(1.0));
  const InteractionGraph k4 = graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  const auto square = testing::mapping_of({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, 2, 2);
  CHECK(edge_length(square, k4) == doctest::Approx((4.0 + 2.0 * std::sqrt(2.0)) / 6.0));
}

TEST_CASE("edge spacing examples") {
  const InteractionGraph two = graph(4, {{0, 1}, {2, 3}});
  CHECK(edge_spacing(testing::mapping_of({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, 2, 2), two) == doctest::Approx(1.0));
  // Crossing diagonals share the midpoint (1,1).
  CHECK(edge_spacing(testing::mapping_of({{0, 0}, {2, 2}, {0, 2}, {2, 0}}, 3, 3), two) == doctest::Approx(0.0));
  const InteractionGraph three = graph(6, {{0, 1}, {2, 3}, {4, 5}});
  const auto m = testing::mapping_of({{0, 0}, {2, 0}, {0, 3}, {2, 3}, {5, 0}, {5, 4}}, 6, 5);
  // Midpoints (1,0), (1,3), (5,2): pair distances 3, sqrt(20), sqrt(17).
  CHECK(edge_spacing(m, three) == doctest::Approx((3.0 + std::sqrt(20.0) + std::sqrt(17.0)) / 3.0));
  CHECK_THROWS_AS(edge_spacing(testing::mapping_of({{0, 0}, {1, 0}}, 2, 1), graph(2, {{0, 1}})), InvalidArgument);
}

TEST_CASE("crossing examples") {
  const InteractionGraph two = graph(4, {{0, 1}, {2, 3}});
  CHECK(crossing_count(testing::mapping_of({{0, 0}, {2, 2}, {0, 2}, {2, 0}}, 3, 3), two) == 1);
  CHECK(crossing_count(testing::mapping_of({{0, 0}, {2, 0}, {0, 1}, {2, 1}}, 3, 2), two) == 0);
  // Collinear overlap counts.
  CHECK(crossing_count(testing::mapping_of({{0, 0}, {2, 0}, {1, 0}, {3, 0}}, 4, 1), two) == 1);
  // Shared endpoints never count.
  const InteractionGraph star = graph(3, {{0, 1}, {0, 2}});
  CHECK(crossing_count(testing::mapping_of({{0, 0}, {2, 0}, {1, 0}}, 3, 1), star) == 0);
}

TEST_CASE("crossing count matches the segment oracle on random instances") {
  testing::Gen gen(101);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = gen.uniform(3, 9), h = gen.uniform(3, 9);
    const int n = gen.uniform(4, std::min(24, w * h));
    const InteractionGraph g = gen.igraph(n, 20);
    const auto m = testing::mapping_of(gen.distinct_cells(n, w, h), w, h);
    CAPTURE(trial);
    CHECK(crossing_count(m, g) == testing::oracle_crossings(m, g));
  }
}

TEST_CASE("segment intersection agrees with the rational oracle") {
  testing::Gen gen(7);
  for (int i = 0; i < 20000; ++i) {
    const Cell a = gen.cell(5, 5), b = gen.cell(5, 5), c = gen.cell(5, 5), d = gen.cell(5, 5);
    if (a == b || c == d) continue;
    CHECK(segments_intersect(a, b, c, d) == testing::oracle_intersect(a, b, c, d));
  }
}

TEST_CASE("spacing matches the pairwise oracle with multiplicities") {
  testing::Gen gen(13);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = gen.uniform(4, 15);
    const InteractionGraph g = gen.igraph(n, gen.uniform(2, 20));
    const auto m = testing::mapping_of(gen.distinct_cells(n, 6, 6), 6, 6);
    CHECK(edge_spacing(m, g) == doctest::Approx(oracle_spacing(m, g)).epsilon(1e-12));
  }
}

TEST_CASE("metrics are translation invariant and edge-order independent") {
  testing::Gen gen(19);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = gen.uniform(4, 16);
    InteractionGraph g = gen.igraph(n, gen.uniform(2, 20));
    auto cells = gen.distinct_cells(n, 7, 7);
    const auto m = testing::mapping_of(cells, 7, 7);
    const int dx = gen.uniform(0, 5), dy = gen.uniform(0, 5);
    for (auto& c : cells) c = {c.x + dx, c.y + dy};
    const auto shifted = testing::mapping_of(cells, 12, 12);
    const MetricReport a = metrics(m, g), b = metrics(shifted, g);
    CHECK(a.crossing_count == b.crossing_count);
    CHECK(a.avg_edge_length == doctest::Approx(b.avg_edge_length));
    CHECK(a.avg_edge_spacing == doctest::Approx(b.avg_edge_spacing));
    std::shuffle(g.edges.begin(), g.edges.end(), gen.engine());
    CHECK(crossing_count(m, g) == a.crossing_count);
    CHECK(a.crossing_count >= 0);
    CHECK(a.avg_edge_length >= 1.0);
  }
}

TEST_CASE("linear mapping geometry") {
  const Circuit c = build_module(2);
  const GridMapping m = linear_mapping(c);
  CHECK_NOTHROW(check_mapping(m, c.qubit_count()));
  CHECK(m.height <= 5);
  int lo = m.height, hi = -1;
  for (const Cell& p : m.placement) lo = std::min(lo, p.y), hi = std::max(hi, p.y);
  CHECK(hi - lo + 1 <= 3);

  Circuit single;
  single.qubits.push_back({0, Role::Ancilla, 1, 0, 0});
  const GridMapping s = linear_mapping(single);
  CHECK(s.width == 3);
  CHECK(s.height == 3);
  CHECK(s.at(0) == Cell{1, 1});

  const Circuit f = build_factory(factory(2, 2));
  const GridMapping fm = linear_mapping(f);
  CHECK_NOTHROW(check_mapping(fm, f.qubit_count()));
  const auto& m0 = f.module(1, 0);
  const auto& m1 = f.module(1, 1);
  int max0 = -1, min1 = fm.width;
  for (const auto* list : {&m0.raw, &m0.anc, &m0.out})
    for (QubitId q : *list) max0 = std::max(max0, fm.at(q).x);
  for (const auto* list : {&m1.raw, &m1.anc, &m1.out})
    for (QubitId q : *list) min1 = std::min(min1, fm.at(q).x);
  CHECK(min1 > max0);
  // Rounds stack top to bottom.
  int round1_max_y = -1, round2_min_y = fm.height;
  for (const auto& q : f.qubits) {
    if (q.role == Role::BarrierControl) continue;
    if (q.round == 1 && q.role != Role::Output) round1_max_y = std::max(round1_max_y, fm.at(q.id).y);
    if (q.round == 2) round2_min_y = std::min(round2_min_y, fm.at(q.id).y);
  }
  CHECK(round2_min_y > round1_max_y);
}

TEST_CASE("random mapping") {
  const Circuit c = build_module(2);
  const GridMapping a = random_mapping(c, 6, 6, 42);
  const GridMapping b = random_mapping(c, 6, 6, 42);
  CHECK(a.placement == b.placement);
  CHECK_NOTHROW(check_mapping(a, c.qubit_count()));
  CHECK(random_mapping(c, 6, 6, 43).placement != a.placement);
  CHECK_THROWS_AS(random_mapping(c, 4, 5, 1), InvalidArgument);

  const GridMapping full = random_mapping(12, 4, 3, 9);
  std::set<Cell> cells(full.placement.begin(), full.placement.end());
  CHECK(cells.size() == 12);
}

TEST_CASE("random mapping occupies cells uniformly") {
  // 6 qubits on a 4x4 grid: each cell is occupied with p = 6/16.
  const int seeds = 1000, n = 6, cells = 16;
  std::vector<int> hits(cells, 0);
  for (int s = 0; s < seeds; ++s) {
    const GridMapping m = random_mapping(static_cast<std::size_t>(n), 4, 4, static_cast<std::uint64_t>(s));
    for (const Cell& c : m.placement) ++hits[static_cast<std::size_t>(c.y * 4 + c.x)];
  }
  const double p = static_cast<double>(n) / cells, mean = seeds * p, sigma = std::sqrt(seeds * p * (1 - p));
  double chi2 = 0.0;
  for (int h : hits) {
    CHECK(std::abs(h - mean) <= 5 * sigma);
    chi2 += (h - mean) * (h - mean) / mean;
  }
  // Sum of occupancies is fixed, so 15 degrees of freedom; 99.9th percentile is 37.7.
  CHECK(chi2 < 37.7);
}

TEST_CASE("mapping validation") {
  CHECK_THROWS_AS(check_mapping(testing::mapping_of({{0, 0}, {0, 0}}, 2, 2), 2), InvalidArgument);
  CHECK_THROWS_AS(check_mapping(testing::mapping_of({{0, 0}, {2, 0}}, 2, 2), 2), InvalidArgument);
  CHECK_THROWS_AS(check_mapping(testing::mapping_of({{0, 0}}, 2, 2), 2), InvalidArgument);
  GridMapping m = testing::mapping_of({{0, 0}, {1, 1}}, 2, 2);
  m.midpoints[{0, 1}] = {5, 5};
  CHECK_THROWS_AS(check_mapping(m, 2), InvalidArgument);
}

TEST_CASE("tighten moves the bounding box to the margin") {
  GridMapping m = testing::mapping_of({{4, 5}, {6, 7}}, 10, 10);
  m.midpoints[{0, 1}] = {5, 6};
  tighten(m, 1);
  CHECK(m.at(0) == Cell{1, 1});
  CHECK(m.at(1) == Cell{3, 3});
  CHECK(m.midpoints.at({0, 1}) == Cell{2, 2});
  CHECK(m.width == 5);
  CHECK(m.height == 5);
}

TEST_CASE("mapping text round trip") {
  const Circuit c = build_factory(factory(2, 2));
  GridMapping m = linear_mapping(c);
  m.midpoints[{0, 1}] = {2, 2};
  std::ostringstream os;
  write_mapping(os, m, &c);
  CHECK(os.str().find("round 2") != std::string::npos);
  std::istringstream is(os.str());
  const GridMapping back = read_mapping(is);
  CHECK(back.width == m.width);
  CHECK(back.height == m.height);
  CHECK(back.placement == m.placement);
  CHECK(back.midpoints == m.midpoints);
  std::istringstream bad("qubit 0 1 1\n");
  CHECK_THROWS_AS(read_mapping(bad), ParseError);
  CHECK_THROWS_AS(load_mapping("/nonexistent/mapping.txt"), IoError);
}
