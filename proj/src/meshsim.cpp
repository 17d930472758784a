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
#include "msfc/meshsim.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <set>

#include "msfc/error.hpp"
#include "msfc/igraph.hpp"

namespace msfc {

Router::Router(int width, int height)
    : width_(width),
      height_(height),
      busy_(static_cast<std::size_t>(width) * height, 0),
      seen_(busy_.size(), 0),
      dist_(busy_.size(), 0),
      parent_(busy_.size(), -1),
      fail_mark_(busy_.size(), 0),
      own_(busy_.size(), 0) {
  if (width <= 0 || height <= 0) throw InvalidArgument("router grid must be nonempty");
}

void Router::next_timestep() {
  ++stamp_;
  ++owner_;
  fail_floor_ = fail_id_ + 1;
  pending_.clear();
}

bool Router::occupied(Cell c) const { return busy_[static_cast<std::size_t>(index(c))] == stamp_; }

void Router::reserve(Cell c) {
  auto& b = busy_[static_cast<std::size_t>(index(c))];
  if (b == stamp_)
    throw Error("cell (" + std::to_string(c.x) + "," + std::to_string(c.y) + ") reserved twice in one timestep");
  b = stamp_;
  own_[static_cast<std::size_t>(index(c))] = owner_;
  pending_.push_back(index(c));
}

bool Router::pending(Cell c) const {
  const auto i = static_cast<std::size_t>(index(c));
  return busy_[i] == stamp_ && own_[i] == owner_;
}

void Router::commit() {
  pending_.clear();
  ++owner_;
}

void Router::rollback() {
  for (int i : pending_) busy_[static_cast<std::size_t>(i)] = 0;
  pending_.clear();
  ++owner_;
}

bool Router::route(Cell src, Cell dst, std::vector<Cell>& path) {
  path.clear();
  if (!in_bounds(src) || !in_bounds(dst)) throw InvalidArgument("route endpoint out of bounds");
  if (src == dst) {
    path.push_back(src);
    return true;
  }
  const int s = index(src);
  const int d = index(dst);
  const bool cacheable = pending_.empty() && !occupied(src) && !occupied(dst);
  if (cacheable) {
    const std::uint32_t ms = fail_mark_[static_cast<std::size_t>(s)];
    const std::uint32_t md = fail_mark_[static_cast<std::size_t>(d)];
    const bool vs = ms >= fail_floor_;
    const bool vd = md >= fail_floor_;
    // Reservations only grow within a timestep, so a failed flood bounds
    // every later component it touched.
    if ((vs || vd) && ms != md) return false;
  }
  ++search_;
  const std::size_t span = busy_.size() + static_cast<std::size_t>(width_ + height_) + 2;
  if (buckets_.size() < span) buckets_.resize(span);
  auto h = [&](int v) { return std::abs(v % width_ - dst.x) + std::abs(v / width_ - dst.y); };
  auto& visited = visited_;
  visited.clear();
  int lo = h(s);
  int hi = lo;
  seen_[static_cast<std::size_t>(s)] = search_;
  dist_[static_cast<std::size_t>(s)] = 0;
  parent_[static_cast<std::size_t>(s)] = -1;
  visited.push_back(s);
  buckets_[static_cast<std::size_t>(lo)].push_back(s);
  bool found = false;
  static constexpr int kDx[4] = {1, 0, -1, 0};
  static constexpr int kDy[4] = {0, 1, 0, -1};
  for (int f = lo; f <= hi && !found; ++f) {
    auto& bucket = buckets_[static_cast<std::size_t>(f)];
    while (!bucket.empty()) {
      const int v = bucket.back();
      bucket.pop_back();
      const int g = dist_[static_cast<std::size_t>(v)];
      if (g + h(v) != f) continue;
      ++expansions_;
      if (v == d) {
        found = true;
        break;
      }
      const int vx = v % width_;
      const int vy = v / width_;
      for (int dir = 0; dir < 4; ++dir) {
        const int nx = vx + kDx[dir];
        const int ny = vy + kDy[dir];
        if (nx < 0 || ny < 0 || nx >= width_ || ny >= height_) continue;
        const int n = ny * width_ + nx;
        if (n != d && busy_[static_cast<std::size_t>(n)] == stamp_ && own_[static_cast<std::size_t>(n)] != owner_) continue;
        const auto un = static_cast<std::size_t>(n);
        if (seen_[un] == search_ && dist_[un] <= g + 1) continue;
        if (seen_[un] != search_) visited.push_back(n);
        seen_[un] = search_;
        dist_[un] = g + 1;
        parent_[un] = v;
        const int nf = g + 1 + h(n);
        buckets_[static_cast<std::size_t>(nf)].push_back(n);
        hi = std::max(hi, nf);
      }
    }
  }
  for (int f = lo; f <= hi; ++f) buckets_[static_cast<std::size_t>(f)].clear();
  if (!found) {
    if (cacheable) {
      ++fail_id_;
      for (int v : visited) fail_mark_[static_cast<std::size_t>(v)] = fail_id_;
    }
    return false;
  }
  for (int v = d; v != -1; v = parent_[static_cast<std::size_t>(v)]) path.push_back({v % width_, v / width_});
  std::reverse(path.begin(), path.end());
  return true;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

int effective_injection_cost(const SimOptions& o) {
  return o.injection_mode == InjectionMode::Expected ? std::max(1, o.injection_cost) : 1;
}

class Engine {
 public:
  Engine(const Circuit& c, const GridMapping& m, const SimOptions& o) : c_(c), m_(m), o_(o), router_(m.width, m.height) {}

  SimReport run() {
    const std::size_t n = c_.gates.size();
    build_dependencies();
    remaining_.resize(n);
    for (std::size_t g = 0; g < n; ++g) remaining_[g] = braids_for(g);
    std::set<int> ready;
    for (std::size_t g = 0; g < n; ++g)
      if (pending_[g] == 0) ready.insert(static_cast<int>(g));
    SimReport r;
    std::size_t done = 0;
    std::int64_t t = 0;
    std::vector<int> completed;
    while (done < n) {
      ++t;
      router_.next_timestep();
      for (Cell b : o_.blocked) router_.reserve(b);
      router_.commit();
      bool progressed = false;
      completed.clear();
      for (auto it = ready.begin(); it != ready.end();) {
        const int g = *it;
        const int len = attempt(g);
        const bool ok = len >= 0;
        if (o_.record_trace) {
          TraceRow row;
          row.timestep = t;
          row.gate = g;
          row.kind = c_.gates[static_cast<std::size_t>(g)].kind;
          row.path_length = ok ? len : 0;
          row.stalled = !ok;
          if (ok && o_.record_paths) row.path = path_;
          r.trace.push_back(std::move(row));
        }
        if (!ok) {
          ++r.stalls;
          ++it;
          continue;
        }
        progressed = true;
        if (c_.gates[static_cast<std::size_t>(g)].kind == GateKind::Barrier) r.barrier_timesteps.push_back(t);
        if (--remaining_[static_cast<std::size_t>(g)] > 0) {
          ++it;
          continue;
        }
        completed.push_back(g);
        it = ready.erase(it);
      }
      if (!progressed)
        throw UnroutableError("gate " + std::to_string(*ready.begin()) + " cannot be routed on an otherwise idle mesh");
      for (int g : completed) {
        ++done;
        for (int s = succ_start_[static_cast<std::size_t>(g)]; s < succ_start_[static_cast<std::size_t>(g) + 1]; ++s) {
          const int nx = succ_[static_cast<std::size_t>(s)];
          if (--pending_[static_cast<std::size_t>(nx)] == 0) ready.insert(nx);
        }
      }
    }
    r.latency = t;
    r.width = m_.width;
    r.height = m_.height;
    r.area = m_.area();
    r.volume = r.area * r.latency;
    r.critical_path = critical_path(c_, effective_injection_cost(o_));
    std::int64_t prev = 0;
    for (std::int64_t b : r.barrier_timesteps) {
      r.round_latency.push_back(b - prev - 1);
      prev = b;
    }
    r.round_latency.push_back(r.latency - prev);
    return r;
  }

 private:
  void build_dependencies() {
    const std::size_t n = c_.gates.size();
    std::vector<int> last(c_.qubits.size(), -1);
    std::vector<int> mark(n, -1);
    std::vector<std::pair<int, int>> edges;
    pending_.assign(n, 0);
    for (std::size_t g = 0; g < n; ++g) {
      for (QubitId q : c_.gates[g].operands) {
        const int p = last[static_cast<std::size_t>(q)];
        if (p >= 0 && mark[static_cast<std::size_t>(p)] != static_cast<int>(g)) {
          mark[static_cast<std::size_t>(p)] = static_cast<int>(g);
          edges.emplace_back(p, static_cast<int>(g));
          ++pending_[g];
        }
        last[static_cast<std::size_t>(q)] = static_cast<int>(g);
      }
    }
    succ_start_.assign(n + 1, 0);
    for (auto [p, s] : edges) ++succ_start_[static_cast<std::size_t>(p) + 1];
    for (std::size_t i = 0; i < n; ++i) succ_start_[i + 1] += succ_start_[i];
    succ_.resize(edges.size());
    std::vector<int> fill(succ_start_.begin(), succ_start_.end() - 1);
    for (auto [p, s] : edges) succ_[static_cast<std::size_t>(fill[static_cast<std::size_t>(p)]++)] = s;
  }

  int braids_for(std::size_t g) const {
    const Gate& gate = c_.gates[g];
    if (gate.kind != GateKind::InjectT && gate.kind != GateKind::InjectTdag) return 1;
    switch (o_.injection_mode) {
      case InjectionMode::Expected: return std::max(1, o_.injection_cost);
      case InjectionMode::Optimistic: return 1;
      case InjectionMode::Geometric: {
        const std::uint64_t bits = splitmix64(o_.seed ^ splitmix64(g));
        return 1 + std::min(std::countr_one(bits), 62);
      }
    }
    return 1;
  }

  Cell cell(QubitId q) const { return m_.at(q); }

  // Path length on success, -1 on stall. The executed cells land in path_.
  int attempt(int gi) {
    const Gate& g = c_.gates[static_cast<std::size_t>(gi)];
    path_.clear();
    switch (g.kind) {
      case GateKind::Barrier: return 0;
      case GateKind::Init:
      case GateKind::H:
      case GateKind::MeasX: {
        const Cell a = cell(g.operands[0]);
        if (router_.occupied(a)) return -1;
        router_.reserve(a);
        router_.commit();
        path_.push_back(a);
        return 1;
      }
      case GateKind::CNOT:
      case GateKind::InjectT:
      case GateKind::InjectTdag: return two_qubit(g);
      case GateKind::CXX: return fan_out(g);
    }
    return -1;
  }

  bool extend(Cell from, Cell to, bool skip_first) {
    if (!router_.route(from, to, seg_)) return false;
    for (std::size_t i = skip_first ? 1 : 0; i < seg_.size(); ++i) {
      if (router_.pending(seg_[i])) continue;
      router_.reserve(seg_[i]);
      path_.push_back(seg_[i]);
    }
    return true;
  }

  int two_qubit(const Gate& g) {
    const Cell a = cell(g.operands[0]);
    const Cell b = cell(g.operands[1]);
    if (router_.occupied(a) || router_.occupied(b)) return -1;
    std::optional<Cell> mid;
    if (o_.use_midpoints && !m_.midpoints.empty()) {
      auto it = m_.midpoints.find({g.operands[0], g.operands[1]});
      if (it != m_.midpoints.end() && it->second != a && it->second != b) mid = it->second;
    }
    if (mid) {
      if (router_.occupied(*mid)) return -1;
      if (!extend(a, *mid, false) || !extend(*mid, b, true)) {
        router_.rollback();
        path_.clear();
        return -1;
      }
    } else if (!extend(a, b, false)) {
      router_.rollback();
      path_.clear();
      return -1;
    }
    router_.commit();
    return static_cast<int>(path_.size());
  }

  int fan_out(const Gate& g) {
    for (QubitId q : g.operands)
      if (router_.occupied(cell(q))) return -1;
    std::vector<Cell> todo;
    for (std::size_t i = 1; i < g.operands.size(); ++i) todo.push_back(cell(g.operands[i]));
    Cell cur = cell(g.operands[0]);
    router_.reserve(cur);
    path_.push_back(cur);
    while (!todo.empty()) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < todo.size(); ++i)
        if (manhattan(cur, todo[i]) < manhattan(cur, todo[best])) best = i;
      const Cell next = todo[best];
      if (!extend(cur, next, true)) {
        router_.rollback();
        path_.clear();
        return -1;
      }
      std::erase_if(todo, [&](Cell t) { return router_.pending(t); });
      cur = next;
    }
    router_.commit();
    return static_cast<int>(path_.size());
  }

  const Circuit& c_;
  const GridMapping& m_;
  const SimOptions& o_;
  Router router_;
  std::vector<int> pending_;
  std::vector<int> succ_start_;
  std::vector<int> succ_;
  std::vector<int> remaining_;
  std::vector<Cell> path_;
  std::vector<Cell> seg_;
};

}  // namespace

const char* to_string(InjectionMode m) {
  switch (m) {
    case InjectionMode::Expected: return "Expected";
    case InjectionMode::Optimistic: return "Optimistic";
    case InjectionMode::Geometric: return "Geometric";
  }
  return "?";
}

InjectionMode parse_injection_mode(const std::string& s) {
  for (InjectionMode m : {InjectionMode::Expected, InjectionMode::Optimistic, InjectionMode::Geometric})
    if (s == to_string(m)) return m;
  throw ParseError("unknown injection mode '" + s + "'");
}

SimReport simulate(const Circuit& c, const GridMapping& m, const SimOptions& opts) {
  check_mapping(m, c.qubits.size());
  for (Cell b : opts.blocked)
    if (!m.in_bounds(b)) throw InvalidArgument("blocked cell out of bounds");
  Engine e(c, m, opts);
  return e.run();
}

void attach_physical(SimReport& report, const FactoryConfig& config, const ErrorModel& model) {
  if (report.round_latency.size() != static_cast<std::size_t>(config.levels_l))
    throw InvalidArgument("report round count does not match the factory levels");
  double total = 0.0;
  for (int r = 1; r <= config.levels_l; ++r)
    total += round_area(config, model, r) * static_cast<double>(report.round_latency[static_cast<std::size_t>(r - 1)]);
  report.physical_volume = total;
  report.has_physical = true;
}

std::int64_t permutation_latency(const Circuit& c, const GridMapping& m, int boundary, const SimOptions& opts) {
  Circuit sub;
  sub.k = c.k;
  sub.levels = c.levels;
  sub.qubits = c.qubits;
  for (const Gate& g : c.gates)
    if (g.permutation && g.round == boundary + 1) sub.gates.push_back(g);
  if (sub.gates.empty()) return 0;
  SimOptions o = opts;
  o.record_trace = false;
  o.record_paths = false;
  return simulate(sub, m, o).latency;
}

void write_trace(std::ostream& os, const SimReport& r) {
  os << "timestep,gate,kind,path_length,stalled\n";
  for (const auto& row : r.trace)
    os << row.timestep << ',' << row.gate << ',' << to_string(row.kind) << ',' << row.path_length << ','
       << (row.stalled ? 1 : 0) << '\n';
}

}  // namespace msfc
