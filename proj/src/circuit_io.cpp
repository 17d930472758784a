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
#include "msfc/circuit_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "msfc/error.hpp"

namespace msfc {

namespace {

void write_ids(std::ostream& os, const char* tag, const std::vector<QubitId>& ids) {
  os << tag;
  for (QubitId q : ids) os << ' ' << q;
  os << '\n';
}

std::vector<QubitId> read_ids(std::istringstream& ls) {
  std::vector<QubitId> ids;
  QubitId q;
  while (ls >> q) ids.push_back(q);
  return ids;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ParseError("circuit line " + std::to_string(line) + ": " + what);
}

}  // namespace

void write_circuit(std::ostream& os, const Circuit& c) {
  os << "msfc-circuit 1\n";
  os << "k " << c.k << '\n';
  os << "levels " << c.levels << '\n';
  for (const auto& q : c.qubits)
    os << "qubit " << q.id << ' ' << to_string(q.role) << ' ' << q.round << ' ' << q.module_index << ' '
       << q.port_index << '\n';
  for (const auto& m : c.modules) {
    os << "module " << m.round << ' ' << m.index << '\n';
    write_ids(os, "raw", m.raw);
    write_ids(os, "anc", m.anc);
    write_ids(os, "out", m.out);
  }
  for (const auto& w : c.port_wiring)
    os << "wire " << w.round << ' ' << w.src_module << ' ' << w.src_port << ' ' << w.dst_module << ' '
       << w.dst_slot << '\n';
  os << "gates " << c.gates.size() << '\n';
  for (const auto& g : c.gates) {
    os << to_string(g.kind);
    for (QubitId q : g.operands) os << ' ' << q;
    os << " # round=" << g.round << " module=" << g.module_index;
    if (g.permutation) os << " perm=1";
    os << '\n';
  }
}

Circuit read_circuit(std::istream& is) {
  Circuit c;
  std::string line;
  int lineno = 0;
  bool in_gates = false;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (in_gates) {
      const auto hash = line.find('#');
      std::istringstream ls(line.substr(0, hash));
      std::string kind;
      ls >> kind;
      Gate g;
      g.kind = parse_gate_kind(kind);
      g.operands = read_ids(ls);
      if (hash != std::string::npos) {
        std::istringstream ann(line.substr(hash + 1));
        std::string kv;
        while (ann >> kv) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) fail(lineno, "bad annotation '" + kv + "'");
          const std::string key = kv.substr(0, eq);
          int val = 0;
          std::istringstream vs(kv.substr(eq + 1));
          if (!(vs >> val)) fail(lineno, "bad annotation value '" + kv + "'");
          if (key == "round") g.round = val;
          else if (key == "module") g.module_index = val;
          else if (key == "perm") g.permutation = val != 0;
          else fail(lineno, "unknown annotation '" + key + "'");
        }
      }
      c.gates.push_back(std::move(g));
      continue;
    }
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "msfc-circuit") {
      header = true;
    } else if (tag == "k") {
      ls >> c.k;
    } else if (tag == "levels") {
      ls >> c.levels;
    } else if (tag == "qubit") {
      QubitRef q;
      std::string role;
      if (!(ls >> q.id >> role >> q.round >> q.module_index >> q.port_index)) fail(lineno, "bad qubit line");
      q.role = parse_role(role);
      if (q.id != static_cast<QubitId>(c.qubits.size())) fail(lineno, "qubit ids must be dense and ordered");
      c.qubits.push_back(q);
    } else if (tag == "module") {
      ModuleInfo m;
      if (!(ls >> m.round >> m.index)) fail(lineno, "bad module line");
      c.modules.push_back(std::move(m));
    } else if (tag == "raw" || tag == "anc" || tag == "out") {
      if (c.modules.empty()) fail(lineno, "register list before module");
      auto ids = read_ids(ls);
      auto& m = c.modules.back();
      (tag == "raw" ? m.raw : tag == "anc" ? m.anc : m.out) = std::move(ids);
    } else if (tag == "wire") {
      WiringEdge w;
      if (!(ls >> w.round >> w.src_module >> w.src_port >> w.dst_module >> w.dst_slot)) fail(lineno, "bad wire line");
      c.port_wiring.push_back(w);
    } else if (tag == "gates") {
      in_gates = true;
    } else {
      fail(lineno, "unknown record '" + tag + "'");
    }
  }
  if (!header) throw ParseError("missing msfc-circuit header");
  for (std::size_t i = 0; i < c.gates.size(); ++i)
    if (c.gates[i].kind == GateKind::Barrier) c.round_boundaries.push_back(i);
  try {
    check_circuit(c);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid circuit: ") + e.what());
  }
  return c;
}

void save_circuit(const std::string& path, const Circuit& c) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_circuit(os, c);
  if (!os) throw IoError("write failed for '" + path + "'");
}

Circuit load_circuit(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read_circuit(is);
}

}  // namespace msfc
