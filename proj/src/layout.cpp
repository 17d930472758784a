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
#include "msfc/layout.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "msfc/error.hpp"

namespace msfc {

std::vector<QubitId> GridMapping::occupancy() const {
  std::vector<QubitId> occ(static_cast<std::size_t>(area()), kNoQubit);
  for (std::size_t q = 0; q < placement.size(); ++q) {
    const Cell c = placement[q];
    if (in_bounds(c)) occ[static_cast<std::size_t>(c.y) * width + c.x] = static_cast<QubitId>(q);
  }
  return occ;
}

void check_mapping(const GridMapping& m, std::size_t qubit_count) {
  if (m.width <= 0 || m.height <= 0) throw InvalidArgument("grid dimensions must be positive");
  if (m.placement.size() != qubit_count) throw InvalidArgument("mapping does not cover every qubit");
  std::vector<char> used(static_cast<std::size_t>(m.area()), 0);
  for (std::size_t q = 0; q < qubit_count; ++q) {
    const Cell c = m.placement[q];
    if (!m.in_bounds(c)) throw InvalidArgument("qubit " + std::to_string(q) + " placed out of bounds");
    char& u = used[static_cast<std::size_t>(c.y) * m.width + c.x];
    if (u) throw InvalidArgument("two qubits share cell (" + std::to_string(c.x) + "," + std::to_string(c.y) + ")");
    u = 1;
  }
  for (const auto& [key, cell] : m.midpoints) {
    if (!m.in_bounds(cell)) throw InvalidArgument("midpoint out of bounds");
    if (key.first < 0 || key.second < 0 || static_cast<std::size_t>(key.first) >= qubit_count ||
        static_cast<std::size_t>(key.second) >= qubit_count)
      throw InvalidArgument("midpoint references unknown qubit");
  }
}

void tighten(GridMapping& m, int margin) {
  int x0 = INT32_MAX, y0 = INT32_MAX, x1 = INT32_MIN, y1 = INT32_MIN;
  for (const Cell c : m.placement) {
    if (c == kUnplaced) continue;
    x0 = std::min(x0, c.x);
    y0 = std::min(y0, c.y);
    x1 = std::max(x1, c.x);
    y1 = std::max(y1, c.y);
  }
  if (x0 > x1) {
    m.width = m.height = 2 * margin + 1;
    return;
  }
  for (Cell& c : m.placement) {
    if (c == kUnplaced) continue;
    c.x += margin - x0;
    c.y += margin - y0;
  }
  for (auto& [key, c] : m.midpoints) {
    c.x = std::clamp(c.x + margin - x0, 0, x1 - x0 + 2 * margin);
    c.y = std::clamp(c.y + margin - y0, 0, y1 - y0 + 2 * margin);
  }
  m.width = x1 - x0 + 1 + 2 * margin;
  m.height = y1 - y0 + 1 + 2 * margin;
}

GridMapping linear_mapping(const Circuit& c) {
  GridMapping m;
  m.placement.assign(c.qubits.size(), kUnplaced);
  const int k = c.k;
  const int w = 2 * k + 5;
  int y = 0;
  for (int r = 1; r <= c.levels; ++r) {
    std::vector<const ModuleInfo*> mods;
    for (const auto& mod : c.modules) {
      if (mod.round != r) continue;
      bool fresh = false;
      for (const auto* list : {&mod.raw, &mod.anc, &mod.out})
        for (QubitId q : *list) fresh |= m.at(q) == kUnplaced;
      if (fresh) mods.push_back(&mod);
    }
    if (mods.empty()) continue;
    // Bands of `cols` modules; the band count keeps the round near square.
    const double side = std::sqrt(static_cast<double>(mods.size()) * 3.0 * w);
    const int cols = std::clamp(static_cast<int>(std::ceil(side / w)), 1, static_cast<int>(mods.size()));
    for (std::size_t i = 0; i < mods.size(); ++i) {
      const ModuleInfo& mod = *mods[i];
      const int x0 = static_cast<int>(i % cols) * w;
      const int y0 = y + static_cast<int>(i / cols) * 3;
      auto put = [&](QubitId q, int x, int yy) {
        if (m.at(q) == kUnplaced) m.placement[static_cast<std::size_t>(q)] = {x, yy};
      };
      for (int a = 0; a < k + 5; ++a) put(mod.anc[static_cast<std::size_t>(a)], x0 + a, y0 + 1);
      for (int o = 0; o < k; ++o) put(mod.out[static_cast<std::size_t>(o)], x0 + k + 5 + o, y0 + 1);
      for (int a = 1; a < k + 5; ++a) {
        put(mod.raw[static_cast<std::size_t>(2 * a - 2)], x0 + a, y0);
        put(mod.raw[static_cast<std::size_t>(2 * a - 1)], x0 + a, y0 + 2);
      }
      for (int j = 0; j < k; ++j) put(mod.raw[static_cast<std::size_t>(2 * k + 8 + j)], x0 + k + 5 + j, y0);
    }
    y += static_cast<int>((mods.size() + cols - 1) / cols) * 3;
  }
  // Qubits outside modules take the free cells above each anc[0], else a new row.
  int width = 1;
  for (const Cell cl : m.placement) width = std::max(width, cl.x + 1);
  std::vector<char> used(static_cast<std::size_t>(width) * static_cast<std::size_t>(std::max(y, 1)), 0);
  for (const Cell cl : m.placement)
    if (cl != kUnplaced) used[static_cast<std::size_t>(cl.y) * width + cl.x] = 1;
  int extra = 0;
  for (auto& cl : m.placement) {
    if (cl != kUnplaced) continue;
    bool done = false;
    for (int yy = 0; yy < y && !done; yy += 3)
      for (int x = 0; x < width && !done; x += w)
        if (!used[static_cast<std::size_t>(yy) * width + x]) {
          used[static_cast<std::size_t>(yy) * width + x] = 1;
          cl = {x, yy};
          done = true;
        }
    if (!done) cl = {extra++, y};
  }
  tighten(m, 1);
  return m;
}

GridMapping random_mapping(std::size_t qubit_count, int width, int height, std::uint64_t seed) {
  if (width <= 0 || height <= 0) throw InvalidArgument("grid dimensions must be positive");
  const auto cells = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (cells < qubit_count) throw InvalidArgument("grid has fewer cells than qubits");
  std::vector<int> order(cells);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  GridMapping m;
  m.width = width;
  m.height = height;
  m.placement.resize(qubit_count);
  for (std::size_t q = 0; q < qubit_count; ++q) m.placement[q] = {order[q] % width, order[q] / width};
  return m;
}

GridMapping random_mapping(const Circuit& c, int width, int height, std::uint64_t seed) {
  return random_mapping(c.qubits.size(), width, height, seed);
}

namespace {

void require_mapped(const GridMapping& m, const InteractionGraph& g) {
  for (const auto& e : g.edges)
    if (static_cast<std::size_t>(std::max(e.u, e.v)) >= m.placement.size() || m.at(e.u) == kUnplaced ||
        m.at(e.v) == kUnplaced)
      throw InvalidArgument("edge endpoint is not mapped");
}

int orient(Cell a, Cell b, Cell c) {
  const std::int64_t v = static_cast<std::int64_t>(b.x - a.x) * (c.y - a.y) -
                         static_cast<std::int64_t>(b.y - a.y) * (c.x - a.x);
  return (v > 0) - (v < 0);
}

bool on_segment(Cell a, Cell b, Cell p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(Cell a, Cell b, Cell c, Cell d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double edge_length(const GridMapping& m, const InteractionGraph& g) {
  require_mapped(m, g);
  double sum = 0.0, w = 0.0;
  for (const auto& e : g.edges) {
    sum += e.multiplicity * distance(m.at(e.u), m.at(e.v));
    w += e.multiplicity;
  }
  return w > 0 ? sum / w : 0.0;
}

double edge_spacing(const GridMapping& m, const InteractionGraph& g) {
  require_mapped(m, g);
  if (g.edges.size() < 2) throw InvalidArgument("edge spacing needs at least two edges");
  std::vector<Vec2> mid(g.edges.size());
  std::vector<double> w(g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    mid[i] = 0.5 * (to_vec(m.at(g.edges[i].u)) + to_vec(m.at(g.edges[i].v)));
    w[i] = g.edges[i].multiplicity;
  }
  double sum = 0.0, total = 0.0;
  for (std::size_t i = 0; i < mid.size(); ++i) {
    double row = 0.0, rw = 0.0;
    for (std::size_t j = i + 1; j < mid.size(); ++j) {
      row += w[j] * std::hypot(mid[i].x - mid[j].x, mid[i].y - mid[j].y);
      rw += w[j];
    }
    sum += w[i] * row;
    total += w[i] * rw;
  }
  return sum / total;
}

std::int64_t crossing_count(const GridMapping& m, const InteractionGraph& g) {
  require_mapped(m, g);
  struct Seg {
    Cell a, b;
    int x0, x1, y0, y1;
    QubitId u, v;
  };
  std::vector<Seg> segs;
  segs.reserve(g.edges.size());
  for (const auto& e : g.edges) {
    const Cell a = m.at(e.u), b = m.at(e.v);
    segs.push_back({a, b, std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y), std::max(a.y, b.y), e.u, e.v});
  }
  std::sort(segs.begin(), segs.end(), [](const Seg& p, const Seg& q) { return p.x0 < q.x0; });
  std::int64_t count = 0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Seg& s = segs[i];
    for (std::size_t j = i + 1; j < segs.size() && segs[j].x0 <= s.x1; ++j) {
      const Seg& t = segs[j];
      if (t.y0 > s.y1 || t.y1 < s.y0) continue;
      if (s.u == t.u || s.u == t.v || s.v == t.u || s.v == t.v) continue;
      if (segments_intersect(s.a, s.b, t.a, t.b)) ++count;
    }
  }
  return count;
}

MetricReport metrics(const GridMapping& m, const InteractionGraph& g) {
  MetricReport r;
  r.avg_edge_length = edge_length(m, g);
  r.avg_edge_spacing = g.edges.size() >= 2 ? edge_spacing(m, g) : 0.0;
  r.crossing_count = crossing_count(m, g);
  return r;
}

void write_mapping(std::ostream& os, const GridMapping& m, const Circuit* c) {
  os << "grid " << m.width << ' ' << m.height << '\n';
  if (c && c->qubits.size() == m.placement.size()) {
    std::vector<std::vector<QubitId>> by_round(static_cast<std::size_t>(c->levels + 1));
    for (const auto& q : c->qubits)
      by_round[static_cast<std::size_t>(std::clamp(q.round, 1, c->levels))].push_back(q.id);
    for (int r = 1; r <= c->levels; ++r) {
      os << "round " << r << '\n';
      for (QubitId q : by_round[static_cast<std::size_t>(r)]) os << q << ' ' << m.at(q).x << ' ' << m.at(q).y << '\n';
    }
  } else {
    for (std::size_t q = 0; q < m.placement.size(); ++q)
      os << q << ' ' << m.placement[q].x << ' ' << m.placement[q].y << '\n';
  }
  for (const auto& [key, cell] : m.midpoints)
    os << "mid " << key.first << ' ' << key.second << ' ' << cell.x << ' ' << cell.y << '\n';
}

GridMapping read_mapping(std::istream& is) {
  GridMapping m;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    auto bad = [&] { throw ParseError("mapping line " + std::to_string(lineno) + ": malformed"); };
    if (tag == "grid") {
      if (!(ls >> m.width >> m.height)) bad();
      header = true;
    } else if (tag == "round") {
      continue;
    } else if (tag == "mid") {
      QubitId u, v;
      Cell c;
      if (!(ls >> u >> v >> c.x >> c.y)) bad();
      m.midpoints[{u, v}] = c;
    } else {
      std::istringstream id(tag);
      QubitId q;
      Cell c;
      if (!(id >> q) || q < 0 || !(ls >> c.x >> c.y)) bad();
      if (m.placement.size() <= static_cast<std::size_t>(q)) m.placement.resize(static_cast<std::size_t>(q) + 1, kUnplaced);
      m.placement[static_cast<std::size_t>(q)] = c;
    }
  }
  if (!header) throw ParseError("mapping lacks a grid header");
  try {
    check_mapping(m, m.placement.size());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid mapping: ") + e.what());
  }
  return m;
}

void save_mapping(const std::string& path, const GridMapping& m, const Circuit* c) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_mapping(os, m, c);
  if (!os) throw IoError("write failed for '" + path + "'");
}

GridMapping load_mapping(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_mapping(is);
}

}  // namespace msfc
