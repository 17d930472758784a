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
#ifndef MSFC_MSFC_H_
#define MSFC_MSFC_H_

#include <stddef.h>
#include <stdint.h>

#if defined(MSFC_BUILDING_LIBRARY)
#define MSFC_API __attribute__((visibility("default")))
#else
#define MSFC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum msfc_status {
  MSFC_OK = 0,
  MSFC_E_INVALID_ARGUMENT = 1,
  MSFC_E_YIELD = 2,       /* error rate at or above the yield threshold */
  MSFC_E_INFEASIBLE = 3,  /* embedding or wiring constraints unsatisfiable */
  MSFC_E_UNROUTABLE = 4,  /* a braid has no path even on an idle mesh */
  MSFC_E_IO = 5,
  MSFC_E_PARSE = 6,
  MSFC_E_INTERNAL = 7
} msfc_status;

typedef struct msfc_config msfc_config;
typedef struct msfc_circuit msfc_circuit;
typedef struct msfc_mapping msfc_mapping; /* circuit plus its grid placement */
typedef struct msfc_report msfc_report;
typedef struct msfc_results msfc_results;

/* Message of the last failed call on this thread; "" after success. */
MSFC_API const char* msfc_last_error(void);
MSFC_API const char* msfc_version(void);
/* Frees strings returned through char** out-parameters. */
MSFC_API void msfc_string_free(char* s);

/* Configuration (JSON document; see docs/config.md). */
MSFC_API msfc_status msfc_config_default(msfc_config** out);
MSFC_API msfc_status msfc_config_parse(const char* json, msfc_config** out);
MSFC_API msfc_status msfc_config_load(const char* path, msfc_config** out);
MSFC_API msfc_status msfc_config_to_json(const msfc_config* c, char** out);
MSFC_API msfc_status msfc_config_get_factory(const msfc_config* c, int* k, int* levels);
MSFC_API msfc_status msfc_config_set_factory(msfc_config* c, int k, int levels);
/* reuse: 0 = NoReuse, 1 = Reuse. */
MSFC_API msfc_status msfc_config_set_reuse(msfc_config* c, int reuse);
/* Sets the factory seed and the single experiment seed. */
MSFC_API msfc_status msfc_config_set_seed(msfc_config* c, uint64_t seed);
MSFC_API msfc_status msfc_config_set_workers(msfc_config* c, int workers);
MSFC_API msfc_status msfc_config_set_out_dir(msfc_config* c, const char* dir);
MSFC_API msfc_status msfc_config_get_out_dir(const msfc_config* c, char** out);
/* Comma-separated procedure list for sweeps, e.g. "Line,GP,HS". */
MSFC_API msfc_status msfc_config_set_procedures(msfc_config* c, const char* list);
/* Replaces the sweep grid with n (k, levels) points. */
MSFC_API msfc_status msfc_config_set_points(msfc_config* c, const int* ks, const int* levels, size_t n);
MSFC_API msfc_status msfc_config_set_corr(msfc_config* c, int k, int levels, int samples);
MSFC_API void msfc_config_free(msfc_config* c);

/* Circuits. */
MSFC_API msfc_status msfc_circuit_build(const msfc_config* c, msfc_circuit** out);
MSFC_API msfc_status msfc_circuit_load(const char* path, msfc_circuit** out);
MSFC_API msfc_status msfc_circuit_to_string(const msfc_circuit* c, char** out);
MSFC_API msfc_status msfc_circuit_counts(const msfc_circuit* c, int64_t* qubits, int64_t* gates);
MSFC_API msfc_status msfc_circuit_critical_path(const msfc_circuit* c, int injection_cost, int64_t* out);
MSFC_API void msfc_circuit_free(msfc_circuit* c);

/* Mapping with a procedure: "Random", "Line", "FD", "GP" or "HS". */
MSFC_API msfc_status msfc_map(const msfc_config* c, const char* procedure, msfc_mapping** out);
MSFC_API msfc_status msfc_mapping_load(const char* circuit_path, const char* mapping_path, msfc_mapping** out);
MSFC_API msfc_status msfc_mapping_to_string(const msfc_mapping* m, char** out);
MSFC_API msfc_status msfc_mapping_circuit_to_string(const msfc_mapping* m, char** out);
MSFC_API msfc_status msfc_mapping_size(const msfc_mapping* m, int* width, int* height);
/* Warnings raised while mapping, newline separated. */
MSFC_API msfc_status msfc_mapping_warnings(const msfc_mapping* m, char** out);
MSFC_API void msfc_mapping_free(msfc_mapping* m);

typedef struct msfc_report_values {
  int64_t latency;
  int64_t area;
  int64_t volume;
  int64_t critical_path;
  int64_t stalls;
  int32_t width;
  int32_t height;
  int32_t has_physical;
  double physical_volume;
  double avg_edge_length;
  double avg_edge_spacing;
  int64_t crossings;
} msfc_report_values;

MSFC_API msfc_status msfc_simulate(const msfc_config* c, const msfc_mapping* m, int record_trace, msfc_report** out);
MSFC_API msfc_status msfc_report_values_get(const msfc_report* r, msfc_report_values* out);
/* Per-round latencies; *count receives the round count. */
MSFC_API msfc_status msfc_report_rounds(const msfc_report* r, int64_t* latencies, size_t capacity, size_t* count);
/* CSV trace: timestep,gate,kind,path_length,stalled. */
MSFC_API msfc_status msfc_report_trace(const msfc_report* r, char** out);
MSFC_API void msfc_report_free(msfc_report* r);

/* Experiment sweeps. */
typedef struct msfc_row {
  int32_t k;
  int32_t levels;
  const char* procedure; /* valid while the results handle lives */
  int32_t reuse;
  uint64_t seed;
  int64_t latency;
  int64_t area;
  int64_t volume;
  double physical_volume;
  int64_t crossings;
  double avg_edge_length;
  int64_t critical_path;
  double runtime_ms;
  int32_t best;
  const char* error; /* "" for a successful cell */
} msfc_row;

MSFC_API msfc_status msfc_sweep(const msfc_config* c, msfc_results** out);
/* Reads a results.csv or results.json file. */
MSFC_API msfc_status msfc_results_load(const char* path, msfc_results** out);
MSFC_API msfc_status msfc_results_count(const msfc_results* r, size_t* out);
MSFC_API msfc_status msfc_results_row(const msfc_results* r, size_t index, msfc_row* out);
/* format: "csv", "json" or "plotdata". */
MSFC_API msfc_status msfc_results_emit(const msfc_results* r, const char* dir, const char* format, int timing);
MSFC_API msfc_status msfc_results_to_csv(const msfc_results* r, int timing, char** out);
MSFC_API void msfc_results_free(msfc_results* r);

/* Correlation study over the config's corr section; undefined r values
   are reported as NaN with the matching bit of *defined cleared
   (bit 0 length, bit 1 spacing, bit 2 crossings). */
MSFC_API msfc_status msfc_correlate(const msfc_config* c, double* r_length, double* r_spacing, double* r_crossings,
                                    int* defined);
MSFC_API msfc_status msfc_correlate_csv(const msfc_config* c, char** out);

/* Volume ratios baseline/target; selectors like "Line:NR" or "HS". */
MSFC_API msfc_status msfc_compare(const msfc_results* r, const char* baseline, const char* target, char** report,
                                  double* geometric_mean);

#ifdef __cplusplus
}
#endif

#endif /* MSFC_MSFC_H_ */
