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
#include "msfc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "msfc/error.hpp"

namespace msfc {

namespace {

using json = nlohmann::json;

// Reads keys of one JSON object into fields, rejecting unknown keys.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(where() + " must be an object");
  }
  ~Section() = default;

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ParseError(where() + "." + key + ": " + e.what());
    }
  }

  template <class E, class Parse>
  void get_enum(const char* key, E& out, Parse parse) {
    std::string s;
    const bool present = j_.contains(key);
    get(key, s);
    if (present) out = parse(s);
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ParseError("unknown key " + where() + "." + it.key());
  }

 private:
  std::string where() const { return path_.empty() ? std::string("<root>") : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_force(const json& j, const std::string& path, ForceParams& f) {
  Section s(j, path);
  s.get("attraction_gain", f.attraction_gain);
  s.get("repulsion_gain", f.repulsion_gain);
  s.get("dipole_gain", f.dipole_gain);
  s.get("w_len", f.w_len);
  s.get("w_space", f.w_space);
  s.get("w_cross", f.w_cross);
  s.get("max_iters", f.max_iters);
  s.get("convergence_window", f.convergence_window);
  s.get("simulated_annealing", f.simulated_annealing);
  s.get("temperature", f.temperature);
  s.get("cooling", f.cooling);
  s.get("seed", f.seed);
  s.get("delta", f.delta);
  s.get("dipole_radius", f.dipole_radius);
  s.get("move_radius", f.move_radius);
  s.get("swap_moves", f.swap_moves);
  s.get("community_kicks", f.community_kicks);
  s.get("max_moves_per_iter", f.max_moves_per_iter);
  s.done();
}

json force_json(const ForceParams& f) {
  return {{"attraction_gain", f.attraction_gain}, {"repulsion_gain", f.repulsion_gain},
          {"dipole_gain", f.dipole_gain},         {"w_len", f.w_len},
          {"w_space", f.w_space},                 {"w_cross", f.w_cross},
          {"max_iters", f.max_iters},             {"convergence_window", f.convergence_window},
          {"simulated_annealing", f.simulated_annealing}, {"temperature", f.temperature},
          {"cooling", f.cooling},                 {"seed", f.seed},
          {"delta", f.delta},                     {"dipole_radius", f.dipole_radius},
          {"move_radius", f.move_radius},         {"swap_moves", f.swap_moves},
          {"community_kicks", f.community_kicks}, {"max_moves_per_iter", f.max_moves_per_iter}};
}

void read_bisect(const json& j, const std::string& path, BisectOptions& b) {
  Section s(j, path);
  s.get("tolerance", b.tolerance);
  s.get("target_fraction", b.target_fraction);
  s.get("max_passes", b.max_passes);
  s.get("initial_tries", b.initial_tries);
  s.done();
}

json bisect_json(const BisectOptions& b) {
  return {{"tolerance", b.tolerance},
          {"target_fraction", b.target_fraction},
          {"max_passes", b.max_passes},
          {"initial_tries", b.initial_tries}};
}

std::vector<ReusePolicy> read_policies(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + " must be an array");
  std::vector<ReusePolicy> out;
  for (const auto& v : j) out.push_back(parse_reuse(v.get<std::string>()));
  return out;
}

}  // namespace

Config parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  Config c;
  Section root(doc, "");
  if (const json* f = root.child("factory")) {
    Section s(*f, "factory");
    s.get("capacity_k", c.factory.capacity_k);
    s.get("levels_l", c.factory.levels_l);
    s.get("eps_inject", c.factory.eps_inject);
    s.get("target_error", c.factory.target_error);
    s.get_enum("reuse_policy", c.factory.reuse_policy, parse_reuse);
    s.get("seed", c.factory.seed);
    s.get("budget_scale", c.factory.budget_scale);
    s.done();
  }
  MethodParams& m = c.methods;
  if (const json* g = root.child("graph")) {
    Section s(*g, "graph");
    s.get("injection_cost", m.graph.injection_cost);
    s.get("include_permutation", m.graph.include_permutation);
    s.done();
  }
  if (const json* g = root.child("sim")) {
    Section s(*g, "sim");
    s.get("injection_cost", m.sim.injection_cost);
    s.get_enum("injection_mode", m.sim.injection_mode, parse_injection_mode);
    s.get("seed", m.sim.seed);
    s.get("use_midpoints", m.sim.use_midpoints);
    s.done();
  }
  if (const json* g = root.child("bisect")) read_bisect(*g, "bisect", m.bisect);
  if (const json* g = root.child("anneal")) read_force(*g, "anneal", m.anneal);
  if (const json* g = root.child("layout")) {
    Section s(*g, "layout");
    s.get("whitespace", m.whitespace);
    s.get("random_margin", m.random_margin);
    s.done();
  }
  if (const json* g = root.child("stitch")) {
    Section s(*g, "stitch");
    StitchParams& p = m.stitch;
    s.get_enum("method", p.method, parse_embed_method);
    s.get_enum("midpoints", p.midpoints, parse_midpoint_mode);
    s.get("whitespace", p.whitespace);
    s.get("fragment_gap", p.fragment_gap);
    s.get("exact_port_limit", p.exact_port_limit);
    s.get("branch_node_limit", p.branch_node_limit);
    s.get("midpoint_refine_work", p.midpoint_refine_work);
    s.get("seed", p.seed);
    if (const json* b = s.child("bisect")) read_bisect(*b, s.path("bisect"), p.bisect);
    if (const json* f = s.child("fragment_force")) read_force(*f, s.path("fragment_force"), p.fragment_force);
    if (const json* f = s.child("midpoint_force")) read_force(*f, s.path("midpoint_force"), p.midpoint_force);
    s.done();
  }
  if (const json* g = root.child("experiment")) {
    Section s(*g, "experiment");
    ExperimentSpec& e = c.experiment;
    s.get("points", e.points);
    if (const json* p = s.child("procedures")) {
      if (!p->is_array()) throw ParseError("experiment.procedures must be an array");
      e.procedures.clear();
      for (const auto& v : *p) e.procedures.push_back(parse_procedure(v.get<std::string>()));
    }
    if (const json* p = s.child("policies")) e.policies = read_policies(*p, "experiment.policies");
    s.get("seeds", e.seeds);
    s.get("eps_inject", e.eps_inject);
    s.get("target_error", e.target_error);
    s.get("budget_scale", e.budget_scale);
    s.get("out_dir", e.out_dir);
    s.get("workers", e.workers);
    s.get("timing", e.timing);
    s.done();
  }
  if (const json* g = root.child("corr")) {
    Section s(*g, "corr");
    s.get("k", c.corr.k);
    s.get("levels", c.corr.levels);
    s.get("samples", c.corr.samples);
    s.get("seed", c.corr.seed);
    s.done();
  }
  root.done();
  validate(c.factory);
  check_params(m.anneal);
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string config_to_json(const Config& c) {
  const MethodParams& m = c.methods;
  const StitchParams& p = m.stitch;
  json procs = json::array();
  for (Procedure x : c.experiment.procedures) procs.push_back(to_string(x));
  json pols = json::array();
  for (ReusePolicy x : c.experiment.policies) pols.push_back(to_string(x));
  json doc = {
      {"factory",
       {{"capacity_k", c.factory.capacity_k},
        {"levels_l", c.factory.levels_l},
        {"eps_inject", c.factory.eps_inject},
        {"target_error", c.factory.target_error},
        {"reuse_policy", to_string(c.factory.reuse_policy)},
        {"seed", c.factory.seed},
        {"budget_scale", c.factory.budget_scale}}},
      {"graph", {{"injection_cost", m.graph.injection_cost}, {"include_permutation", m.graph.include_permutation}}},
      {"sim",
       {{"injection_cost", m.sim.injection_cost},
        {"injection_mode", to_string(m.sim.injection_mode)},
        {"seed", m.sim.seed},
        {"use_midpoints", m.sim.use_midpoints}}},
      {"bisect", bisect_json(m.bisect)},
      {"anneal", force_json(m.anneal)},
      {"layout", {{"whitespace", m.whitespace}, {"random_margin", m.random_margin}}},
      {"stitch",
       {{"method", to_string(p.method)},
        {"midpoints", to_string(p.midpoints)},
        {"whitespace", p.whitespace},
        {"fragment_gap", p.fragment_gap},
        {"exact_port_limit", p.exact_port_limit},
        {"branch_node_limit", p.branch_node_limit},
        {"midpoint_refine_work", p.midpoint_refine_work},
        {"seed", p.seed},
        {"bisect", bisect_json(p.bisect)},
        {"fragment_force", force_json(p.fragment_force)},
        {"midpoint_force", force_json(p.midpoint_force)}}},
      {"experiment",
       {{"points", c.experiment.points},
        {"procedures", procs},
        {"policies", pols},
        {"seeds", c.experiment.seeds},
        {"eps_inject", c.experiment.eps_inject},
        {"target_error", c.experiment.target_error},
        {"budget_scale", c.experiment.budget_scale},
        {"out_dir", c.experiment.out_dir},
        {"workers", c.experiment.workers},
        {"timing", c.experiment.timing}}},
      {"corr", {{"k", c.corr.k}, {"levels", c.corr.levels}, {"samples", c.corr.samples}, {"seed", c.corr.seed}}}};
  return doc.dump(2) + "\n";
}

}  // namespace msfc
