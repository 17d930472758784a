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
#include "msfc/msfc.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <cstdlib>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "msfc/circuit_io.hpp"
#include "msfc/config.hpp"
#include "msfc/error.hpp"
#include "msfc/harness.hpp"

struct msfc_config {
  msfc::Config value;
};

struct msfc_circuit {
  msfc::Circuit value;
};

struct msfc_mapping {
  msfc::MappedFactory value;
};

struct msfc_report {
  msfc::SimReport sim;
  msfc::MetricReport metrics;
};

struct msfc_results {
  std::vector<msfc::ResultRow> rows;
  std::vector<std::string> procedure_names;
};

namespace {

thread_local std::string g_last_error;

msfc_status fail(msfc_status s, const char* what) {
  g_last_error = what && *what ? what : "unknown error";
  return s;
}

template <class F>
msfc_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MSFC_OK;
  } catch (const msfc::YieldThresholdError& e) {
    return fail(MSFC_E_YIELD, e.what());
  } catch (const msfc::InfeasibleError& e) {
    return fail(MSFC_E_INFEASIBLE, e.what());
  } catch (const msfc::UnroutableError& e) {
    return fail(MSFC_E_UNROUTABLE, e.what());
  } catch (const msfc::IoError& e) {
    return fail(MSFC_E_IO, e.what());
  } catch (const msfc::ParseError& e) {
    return fail(MSFC_E_PARSE, e.what());
  } catch (const msfc::InvalidArgument& e) {
    return fail(MSFC_E_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MSFC_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MSFC_E_INTERNAL, e.what());
  } catch (...) {
    return fail(MSFC_E_INTERNAL, "unknown exception");
  }
}

void need(const void* p, const char* name) {
  if (!p) throw msfc::InvalidArgument(std::string(name) + " must not be null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void fill_names(msfc_results& r) {
  r.procedure_names.clear();
  for (const auto& row : r.rows) r.procedure_names.emplace_back(msfc::to_string(row.procedure));
}

}  // namespace

extern "C" {

const char* msfc_last_error(void) { return g_last_error.c_str(); }

const char* msfc_version(void) { return "0.1.0"; }

void msfc_string_free(char* s) { std::free(s); }

msfc_status msfc_config_default(msfc_config** out) {
  return guard([&] {
    need(out, "out");
    *out = new msfc_config{};
  });
}

msfc_status msfc_config_parse(const char* json, msfc_config** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = new msfc_config{msfc::parse_config(json)};
  });
}

msfc_status msfc_config_load(const char* path, msfc_config** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new msfc_config{msfc::load_config(path)};
  });
}

msfc_status msfc_config_to_json(const msfc_config* c, char** out) {
  return guard([&] {
    need(c, "config");
    need(out, "out");
    *out = dup(msfc::config_to_json(c->value));
  });
}

msfc_status msfc_config_get_factory(const msfc_config* c, int* k, int* levels) {
  return guard([&] {
    need(c, "config");
    if (k) *k = c->value.factory.capacity_k;
    if (levels) *levels = c->value.factory.levels_l;
  });
}

msfc_status msfc_config_set_factory(msfc_config* c, int k, int levels) {
  return guard([&] {
    need(c, "config");
    msfc::FactoryConfig f = c->value.factory;
    f.capacity_k = k;
    f.levels_l = levels;
    msfc::validate(f);
    c->value.factory = f;
  });
}

msfc_status msfc_config_set_reuse(msfc_config* c, int reuse) {
  return guard([&] {
    need(c, "config");
    if (reuse != 0 && reuse != 1) throw msfc::InvalidArgument("reuse must be 0 or 1");
    const auto p = reuse ? msfc::ReusePolicy::Reuse : msfc::ReusePolicy::NoReuse;
    c->value.factory.reuse_policy = p;
    c->value.experiment.policies = {p};
  });
}

msfc_status msfc_config_set_seed(msfc_config* c, uint64_t seed) {
  return guard([&] {
    need(c, "config");
    c->value.factory.seed = seed;
    c->value.experiment.seeds = {seed};
    c->value.corr.seed = seed;
  });
}

msfc_status msfc_config_set_workers(msfc_config* c, int workers) {
  return guard([&] {
    need(c, "config");
    if (workers < 1) throw msfc::InvalidArgument("workers must be >= 1");
    c->value.experiment.workers = workers;
  });
}

msfc_status msfc_config_set_out_dir(msfc_config* c, const char* dir) {
  return guard([&] {
    need(c, "config");
    need(dir, "dir");
    c->value.experiment.out_dir = dir;
  });
}

msfc_status msfc_config_set_procedures(msfc_config* c, const char* list) {
  return guard([&] {
    need(c, "config");
    need(list, "list");
    std::vector<msfc::Procedure> procs;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) procs.push_back(msfc::parse_procedure(item));
    if (procs.empty()) throw msfc::InvalidArgument("procedure list is empty");
    c->value.experiment.procedures = procs;
  });
}

msfc_status msfc_config_set_points(msfc_config* c, const int* ks, const int* levels, size_t n) {
  return guard([&] {
    need(c, "config");
    if (n == 0) throw msfc::InvalidArgument("at least one point is required");
    need(ks, "ks");
    need(levels, "levels");
    std::vector<std::pair<int, int>> pts;
    for (size_t i = 0; i < n; ++i) {
      if (ks[i] < 1 || levels[i] < 1) throw msfc::InvalidArgument("points need k >= 1 and levels >= 1");
      pts.emplace_back(ks[i], levels[i]);
    }
    c->value.experiment.points = pts;
  });
}

msfc_status msfc_config_set_corr(msfc_config* c, int k, int levels, int samples) {
  return guard([&] {
    need(c, "config");
    if (k < 1 || levels < 1) throw msfc::InvalidArgument("k and levels must be >= 1");
    if (samples < 10) throw msfc::InvalidArgument("samples must be >= 10");
    c->value.corr.k = k;
    c->value.corr.levels = levels;
    c->value.corr.samples = samples;
  });
}

msfc_status msfc_config_get_out_dir(const msfc_config* c, char** out) {
  return guard([&] {
    need(c, "config");
    need(out, "out");
    *out = dup(c->value.experiment.out_dir);
  });
}

void msfc_config_free(msfc_config* c) { delete c; }

msfc_status msfc_circuit_build(const msfc_config* c, msfc_circuit** out) {
  return guard([&] {
    need(c, "config");
    need(out, "out");
    *out = new msfc_circuit{msfc::build_factory(c->value.factory)};
  });
}

msfc_status msfc_circuit_load(const char* path, msfc_circuit** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new msfc_circuit{msfc::load_circuit(path)};
  });
}

msfc_status msfc_circuit_to_string(const msfc_circuit* c, char** out) {
  return guard([&] {
    need(c, "circuit");
    need(out, "out");
    std::ostringstream ss;
    msfc::write_circuit(ss, c->value);
    *out = dup(ss.str());
  });
}

msfc_status msfc_circuit_counts(const msfc_circuit* c, int64_t* qubits, int64_t* gates) {
  return guard([&] {
    need(c, "circuit");
    if (qubits) *qubits = static_cast<int64_t>(c->value.qubits.size());
    if (gates) *gates = static_cast<int64_t>(c->value.gates.size());
  });
}

msfc_status msfc_circuit_critical_path(const msfc_circuit* c, int injection_cost, int64_t* out) {
  return guard([&] {
    need(c, "circuit");
    need(out, "out");
    *out = msfc::critical_path(c->value, injection_cost);
  });
}

void msfc_circuit_free(msfc_circuit* c) { delete c; }

msfc_status msfc_map(const msfc_config* c, const char* procedure, msfc_mapping** out) {
  return guard([&] {
    need(c, "config");
    need(procedure, "procedure");
    need(out, "out");
    const msfc::Procedure p = msfc::parse_procedure(procedure);
    *out = new msfc_mapping{msfc::map_factory(p, c->value.factory, c->value.methods, c->value.factory.seed)};
  });
}

msfc_status msfc_mapping_load(const char* circuit_path, const char* mapping_path, msfc_mapping** out) {
  return guard([&] {
    need(circuit_path, "circuit_path");
    need(mapping_path, "mapping_path");
    need(out, "out");
    msfc::MappedFactory mf;
    mf.circuit = msfc::load_circuit(circuit_path);
    mf.mapping = msfc::load_mapping(mapping_path);
    msfc::check_mapping(mf.mapping, mf.circuit.qubits.size());
    *out = new msfc_mapping{std::move(mf)};
  });
}

msfc_status msfc_mapping_to_string(const msfc_mapping* m, char** out) {
  return guard([&] {
    need(m, "mapping");
    need(out, "out");
    std::ostringstream ss;
    msfc::write_mapping(ss, m->value.mapping, &m->value.circuit);
    *out = dup(ss.str());
  });
}

msfc_status msfc_mapping_circuit_to_string(const msfc_mapping* m, char** out) {
  return guard([&] {
    need(m, "mapping");
    need(out, "out");
    std::ostringstream ss;
    msfc::write_circuit(ss, m->value.circuit);
    *out = dup(ss.str());
  });
}

msfc_status msfc_mapping_size(const msfc_mapping* m, int* width, int* height) {
  return guard([&] {
    need(m, "mapping");
    if (width) *width = m->value.mapping.width;
    if (height) *height = m->value.mapping.height;
  });
}

msfc_status msfc_mapping_warnings(const msfc_mapping* m, char** out) {
  return guard([&] {
    need(m, "mapping");
    need(out, "out");
    std::string s;
    for (const auto& w : m->value.warnings) s += w + "\n";
    *out = dup(s);
  });
}

void msfc_mapping_free(msfc_mapping* m) { delete m; }

msfc_status msfc_simulate(const msfc_config* c, const msfc_mapping* m, int record_trace, msfc_report** out) {
  return guard([&] {
    need(c, "config");
    need(m, "mapping");
    need(out, "out");
    msfc::SimOptions opts = c->value.methods.sim;
    opts.record_trace = record_trace != 0;
    auto r = std::make_unique<msfc_report>();
    r->sim = msfc::simulate(m->value.circuit, m->value.mapping, opts);
    msfc::FactoryConfig fc = c->value.factory;
    fc.capacity_k = m->value.circuit.k;
    fc.levels_l = m->value.circuit.levels;
    try {
      msfc::attach_physical(r->sim, fc, msfc::build_error_model(fc));
    } catch (const msfc::Error&) {
      r->sim.has_physical = false;
    }
    r->metrics = msfc::metrics(m->value.mapping, msfc::from_circuit(m->value.circuit, c->value.methods.graph));
    *out = r.release();
  });
}

msfc_status msfc_report_values_get(const msfc_report* r, msfc_report_values* out) {
  return guard([&] {
    need(r, "report");
    need(out, "out");
    out->latency = r->sim.latency;
    out->area = r->sim.area;
    out->volume = r->sim.volume;
    out->critical_path = r->sim.critical_path;
    out->stalls = r->sim.stalls;
    out->width = r->sim.width;
    out->height = r->sim.height;
    out->has_physical = r->sim.has_physical ? 1 : 0;
    out->physical_volume = r->sim.has_physical ? r->sim.physical_volume : 0.0;
    out->avg_edge_length = r->metrics.avg_edge_length;
    out->avg_edge_spacing = r->metrics.avg_edge_spacing;
    out->crossings = r->metrics.crossing_count;
  });
}

msfc_status msfc_report_rounds(const msfc_report* r, int64_t* latencies, size_t capacity, size_t* count) {
  return guard([&] {
    need(r, "report");
    need(count, "count");
    *count = r->sim.round_latency.size();
    for (size_t i = 0; i < capacity && i < r->sim.round_latency.size(); ++i) latencies[i] = r->sim.round_latency[i];
  });
}

msfc_status msfc_report_trace(const msfc_report* r, char** out) {
  return guard([&] {
    need(r, "report");
    need(out, "out");
    std::ostringstream ss;
    msfc::write_trace(ss, r->sim);
    *out = dup(ss.str());
  });
}

void msfc_report_free(msfc_report* r) { delete r; }

msfc_status msfc_sweep(const msfc_config* c, msfc_results** out) {
  return guard([&] {
    need(c, "config");
    need(out, "out");
    auto r = std::make_unique<msfc_results>();
    r->rows = msfc::run(c->value.experiment, c->value.methods);
    fill_names(*r);
    *out = r.release();
  });
}

msfc_status msfc_results_load(const char* path, msfc_results** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw msfc::IoError(std::string("cannot open ") + path);
    auto r = std::make_unique<msfc_results>();
    const std::string p(path);
    if (p.size() >= 5 && p.compare(p.size() - 5, 5, ".json") == 0) {
      std::ostringstream ss;
      ss << in.rdbuf();
      r->rows = msfc::rows_from_json(ss.str());
    } else {
      r->rows = msfc::read_csv(in);
    }
    fill_names(*r);
    *out = r.release();
  });
}

msfc_status msfc_results_count(const msfc_results* r, size_t* out) {
  return guard([&] {
    need(r, "results");
    need(out, "out");
    *out = r->rows.size();
  });
}

msfc_status msfc_results_row(const msfc_results* r, size_t index, msfc_row* out) {
  return guard([&] {
    need(r, "results");
    need(out, "out");
    if (index >= r->rows.size()) throw msfc::InvalidArgument("row index out of range");
    const msfc::ResultRow& x = r->rows[index];
    out->k = x.k;
    out->levels = x.levels;
    out->procedure = r->procedure_names[index].c_str();
    out->reuse = x.reuse == msfc::ReusePolicy::Reuse ? 1 : 0;
    out->seed = x.seed;
    out->latency = x.latency;
    out->area = x.area;
    out->volume = x.volume;
    out->physical_volume = x.physical_volume;
    out->crossings = x.crossings;
    out->avg_edge_length = x.avg_edge_length;
    out->critical_path = x.critical_path;
    out->runtime_ms = x.runtime_ms;
    out->best = x.best ? 1 : 0;
    out->error = x.error.c_str();
  });
}

msfc_status msfc_results_emit(const msfc_results* r, const char* dir, const char* format, int timing) {
  return guard([&] {
    need(r, "results");
    need(dir, "dir");
    need(format, "format");
    const std::string f(format);
    msfc::EmitFormat ef;
    if (f == "csv") ef = msfc::EmitFormat::Csv;
    else if (f == "json") ef = msfc::EmitFormat::Json;
    else if (f == "plotdata") ef = msfc::EmitFormat::PlotData;
    else throw msfc::InvalidArgument("unknown format '" + f + "' (csv, json, plotdata)");
    msfc::emit(r->rows, ef, dir, timing != 0);
  });
}

msfc_status msfc_results_to_csv(const msfc_results* r, int timing, char** out) {
  return guard([&] {
    need(r, "results");
    need(out, "out");
    std::ostringstream ss;
    msfc::write_csv(ss, r->rows, timing != 0);
    *out = dup(ss.str());
  });
}

void msfc_results_free(msfc_results* r) { delete r; }

msfc_status msfc_correlate(const msfc_config* c, double* r_length, double* r_spacing, double* r_crossings,
                           int* defined) {
  return guard([&] {
    need(c, "config");
    const msfc::CorrSpec& s = c->value.corr;
    const msfc::CorrelationStudy st = msfc::correlation_study(s.k, s.levels, s.samples, s.seed, c->value.methods);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (r_length) *r_length = st.r_length.value_or(nan);
    if (r_spacing) *r_spacing = st.r_spacing.value_or(nan);
    if (r_crossings) *r_crossings = st.r_crossings.value_or(nan);
    if (defined)
      *defined = (st.r_length ? 1 : 0) | (st.r_spacing ? 2 : 0) | (st.r_crossings ? 4 : 0);
  });
}

msfc_status msfc_correlate_csv(const msfc_config* c, char** out) {
  return guard([&] {
    need(c, "config");
    need(out, "out");
    const msfc::CorrSpec& s = c->value.corr;
    std::ostringstream ss;
    msfc::write_correlation(ss, msfc::correlation_study(s.k, s.levels, s.samples, s.seed, c->value.methods));
    *out = dup(ss.str());
  });
}

msfc_status msfc_compare(const msfc_results* r, const char* baseline, const char* target, char** report,
                         double* geometric_mean) {
  return guard([&] {
    need(r, "results");
    need(baseline, "baseline");
    need(target, "target");
    const msfc::CompareReport rep = msfc::compare(r->rows, msfc::parse_selector(baseline), msfc::parse_selector(target));
    if (geometric_mean) *geometric_mean = rep.geometric_mean;
    if (report) {
      std::ostringstream ss;
      msfc::write_compare(ss, rep);
      *report = dup(ss.str());
    }
  });
}

}  // extern "C"
