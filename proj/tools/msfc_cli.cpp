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
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msfc/msfc.h"

namespace {

// Carries a status code out of a subcommand.
struct Failure {
  msfc_status status;
};

void check(msfc_status s) {
  if (s != MSFC_OK) throw Failure{s};
}

struct ConfigDeleter {
  void operator()(msfc_config* c) const { msfc_config_free(c); }
};
struct MappingDeleter {
  void operator()(msfc_mapping* m) const { msfc_mapping_free(m); }
};
struct CircuitDeleter {
  void operator()(msfc_circuit* c) const { msfc_circuit_free(c); }
};
struct ReportDeleter {
  void operator()(msfc_report* r) const { msfc_report_free(r); }
};
struct ResultsDeleter {
  void operator()(msfc_results* r) const { msfc_results_free(r); }
};
using ConfigPtr = std::unique_ptr<msfc_config, ConfigDeleter>;
using MappingPtr = std::unique_ptr<msfc_mapping, MappingDeleter>;
using CircuitPtr = std::unique_ptr<msfc_circuit, CircuitDeleter>;
using ReportPtr = std::unique_ptr<msfc_report, ReportDeleter>;
using ResultsPtr = std::unique_ptr<msfc_results, ResultsDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  msfc_string_free(s);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "msfc: cannot write " << path << "\n";
    throw Failure{MSFC_E_IO};
  }
  out << text;
  if (!out) {
    std::cerr << "msfc: write failed for " << path << "\n";
    throw Failure{MSFC_E_IO};
  }
}

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> k;
  std::optional<int> levels;
  std::string reuse;  // "", "on", "off"

  void add(CLI::App* app) {
    app->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "Seed for randomized steps");
    app->add_option("-k,--capacity", k, "Output states per module");
    app->add_option("-l,--levels", levels, "Distillation levels");
    app->add_option("--reuse", reuse, "Qubit reuse across rounds")->check(CLI::IsMember({"on", "off"}));
  }

  ConfigPtr load() const {
    msfc_config* raw = nullptr;
    check(config.empty() ? msfc_config_default(&raw) : msfc_config_load(config.c_str(), &raw));
    ConfigPtr c(raw);
    if (seed) check(msfc_config_set_seed(c.get(), *seed));
    if (!reuse.empty()) check(msfc_config_set_reuse(c.get(), reuse == "on" ? 1 : 0));
    if (k || levels) {
      // Keep the other dimension from the config.
      int cur_k = 0, cur_l = 0;
      check(msfc_config_get_factory(c.get(), &cur_k, &cur_l));
      check(msfc_config_set_factory(c.get(), k.value_or(cur_k), levels.value_or(cur_l)));
    }
    return c;
  }
};

void print_report(const msfc_report* r) {
  msfc_report_values v{};
  check(msfc_report_values_get(r, &v));
  std::cout << "latency " << v.latency << "\n"
            << "critical_path " << v.critical_path << "\n"
            << "width " << v.width << "\n"
            << "height " << v.height << "\n"
            << "area " << v.area << "\n"
            << "volume " << v.volume << "\n"
            << "stalls " << v.stalls << "\n"
            << "avg_edge_length " << v.avg_edge_length << "\n"
            << "avg_edge_spacing " << v.avg_edge_spacing << "\n"
            << "crossings " << v.crossings << "\n";
  if (v.has_physical) std::cout << "physical_volume " << v.physical_volume << "\n";
  size_t n = 0;
  check(msfc_report_rounds(r, nullptr, 0, &n));
  std::vector<int64_t> rounds(n);
  check(msfc_report_rounds(r, rounds.data(), n, &n));
  std::cout << "round_latency";
  for (int64_t x : rounds) std::cout << ' ' << x;
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magic-state factory synthesis, mapping and braid simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(msfc_version()));

  Common gen_opt, map_opt, sim_opt, sweep_opt, corr_opt, cfg_opt;

  auto* gen = app.add_subcommand("gen", "Emit the factory circuit");
  gen_opt.add(gen);
  std::string gen_out;
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  auto* map = app.add_subcommand("map", "Map the factory onto the tile grid");
  map_opt.add(map);
  std::string map_out, map_proc = "HS";
  map->add_option("--procedure", map_proc, "Random, Line, FD, GP or HS")
      ->check(CLI::IsMember({"Random", "Line", "FD", "GP", "HS"}));
  map->add_option("--out", map_out, "Directory for circuit.txt and mapping.txt (default: mapping to stdout)");

  auto* sim = app.add_subcommand("sim", "Map and simulate one factory");
  sim_opt.add(sim);
  std::string sim_proc = "HS", sim_trace, sim_circuit, sim_mapping;
  sim->add_option("--procedure", sim_proc, "Random, Line, FD, GP or HS")
      ->check(CLI::IsMember({"Random", "Line", "FD", "GP", "HS"}));
  sim->add_option("--circuit", sim_circuit, "Simulate this circuit file (needs --mapping)")->check(CLI::ExistingFile);
  sim->add_option("--mapping", sim_mapping, "Mapping file for --circuit")->check(CLI::ExistingFile);
  sim->add_option("--trace", sim_trace, "Write the per-gate trace CSV here");

  auto* sweep = app.add_subcommand("sweep", "Run the experiment grid from the config");
  sweep_opt.add(sweep);
  std::string sweep_out, sweep_proc, sweep_format = "all";
  int sweep_workers = 0;
  bool sweep_timing = false;
  sweep->add_option("--procedure", sweep_proc, "Comma-separated procedures (overrides config)");
  sweep->add_option("--out", sweep_out, "Output directory (overrides config)");
  sweep->add_option("--workers", sweep_workers, "Worker threads");
  sweep->add_option("--format", sweep_format, "csv, json, plotdata or all")
      ->check(CLI::IsMember({"csv", "json", "plotdata", "all"}));
  sweep->add_flag("--timing", sweep_timing, "Add the runtime_ms column");

  auto* corr = app.add_subcommand("corr", "Correlate congestion metrics with latency over random mappings");
  corr_opt.add(corr);
  int corr_samples = 0;
  std::string corr_out;
  corr->add_option("--samples", corr_samples, "Number of random mappings");
  corr->add_option("--out", corr_out, "Output file (default stdout)");

  auto* cmp = app.add_subcommand("compare", "Volume ratios between two procedures of a results table");
  std::string cmp_results, cmp_base = "Line:NR", cmp_target = "HS", cmp_out;
  cmp->add_option("--results", cmp_results, "results.csv or results.json")->required()->check(CLI::ExistingFile);
  cmp->add_option("--baseline", cmp_base, "Baseline selector, e.g. Line:NR");
  cmp->add_option("--target", cmp_target, "Target selector, e.g. HS:R");
  cmp->add_option("--out", cmp_out, "Output file (default stdout)");

  auto* cfg = app.add_subcommand("config", "Print the effective configuration");
  cfg_opt.add(cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      ConfigPtr c = gen_opt.load();
      msfc_circuit* raw = nullptr;
      check(msfc_circuit_build(c.get(), &raw));
      CircuitPtr circ(raw);
      char* text = nullptr;
      check(msfc_circuit_to_string(circ.get(), &text));
      write_text(gen_out, take(text));
    } else if (*map) {
      ConfigPtr c = map_opt.load();
      msfc_mapping* raw = nullptr;
      check(msfc_map(c.get(), map_proc.c_str(), &raw));
      MappingPtr m(raw);
      char* warn = nullptr;
      check(msfc_mapping_warnings(m.get(), &warn));
      std::cerr << take(warn);
      char* mtext = nullptr;
      check(msfc_mapping_to_string(m.get(), &mtext));
      if (map_out.empty()) {
        std::cout << take(mtext);
      } else {
        std::filesystem::create_directories(map_out);
        char* ctext = nullptr;
        check(msfc_mapping_circuit_to_string(m.get(), &ctext));
        write_text((std::filesystem::path(map_out) / "circuit.txt").string(), take(ctext));
        write_text((std::filesystem::path(map_out) / "mapping.txt").string(), take(mtext));
      }
    } else if (*sim) {
      ConfigPtr c = sim_opt.load();
      msfc_mapping* raw = nullptr;
      if (!sim_circuit.empty() || !sim_mapping.empty()) {
        if (sim_circuit.empty() || sim_mapping.empty()) {
          std::cerr << "msfc: --circuit and --mapping go together\n";
          return MSFC_E_INVALID_ARGUMENT;
        }
        check(msfc_mapping_load(sim_circuit.c_str(), sim_mapping.c_str(), &raw));
      } else {
        check(msfc_map(c.get(), sim_proc.c_str(), &raw));
      }
      MappingPtr m(raw);
      msfc_report* rep = nullptr;
      check(msfc_simulate(c.get(), m.get(), sim_trace.empty() ? 0 : 1, &rep));
      ReportPtr r(rep);
      print_report(r.get());
      if (!sim_trace.empty()) {
        char* trace = nullptr;
        check(msfc_report_trace(r.get(), &trace));
        write_text(sim_trace, take(trace));
      }
    } else if (*sweep) {
      ConfigPtr c = sweep_opt.load();
      if (!sweep_proc.empty()) check(msfc_config_set_procedures(c.get(), sweep_proc.c_str()));
      if (sweep_opt.k || sweep_opt.levels) {
        const int k = sweep_opt.k.value_or(2), l = sweep_opt.levels.value_or(1);
        check(msfc_config_set_points(c.get(), &k, &l, 1));
      }
      if (!sweep_out.empty()) check(msfc_config_set_out_dir(c.get(), sweep_out.c_str()));
      if (sweep_workers > 0) check(msfc_config_set_workers(c.get(), sweep_workers));
      msfc_results* raw = nullptr;
      check(msfc_sweep(c.get(), &raw));
      ResultsPtr res(raw);
      char* dir_raw = nullptr;
      check(msfc_config_get_out_dir(c.get(), &dir_raw));
      const std::string dir = take(dir_raw);
      for (const char* f : {"csv", "json", "plotdata"})
        if (sweep_format == "all" || sweep_format == f) check(msfc_results_emit(res.get(), dir.c_str(), f, sweep_timing));
      size_t n = 0, errors = 0;
      check(msfc_results_count(res.get(), &n));
      for (size_t i = 0; i < n; ++i) {
        msfc_row row{};
        check(msfc_results_row(res.get(), i, &row));
        if (*row.error) {
          ++errors;
          std::cerr << "msfc: k=" << row.k << " levels=" << row.levels << " " << row.procedure << " seed=" << row.seed
                    << ": " << row.error << "\n";
        }
      }
      std::cout << n << " rows (" << errors << " errors) written to " << dir << "\n";
    } else if (*corr) {
      ConfigPtr c = corr_opt.load();
      if (corr_opt.k || corr_opt.levels || corr_samples > 0)
        check(msfc_config_set_corr(c.get(), corr_opt.k.value_or(4), corr_opt.levels.value_or(1),
                                   corr_samples > 0 ? corr_samples : 50));
      char* text = nullptr;
      check(msfc_correlate_csv(c.get(), &text));
      write_text(corr_out, take(text));
    } else if (*cmp) {
      msfc_results* raw = nullptr;
      check(msfc_results_load(cmp_results.c_str(), &raw));
      ResultsPtr res(raw);
      char* text = nullptr;
      check(msfc_compare(res.get(), cmp_base.c_str(), cmp_target.c_str(), &text, nullptr));
      write_text(cmp_out, take(text));
    } else if (*cfg) {
      ConfigPtr c = cfg_opt.load();
      char* json = nullptr;
      check(msfc_config_to_json(c.get(), &json));
      std::cout << take(json);
    }
  } catch (const Failure& f) {
    const char* msg = msfc_last_error();
    if (msg && *msg) std::cerr << "msfc: " << msg << "\n";
    return static_cast<int>(f.status);
  } catch (const std::exception& e) {
    std::cerr << "msfc: " << e.what() << "\n";
    return MSFC_E_INTERNAL;
  }
  return 0;
}
