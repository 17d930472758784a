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
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "msfc/anneal.hpp"
#include "msfc/bisect.hpp"
#include "msfc/igraph.hpp"
#include "msfc/layout.hpp"
#include "msfc/meshsim.hpp"
#include "msfc/protocol.hpp"
#include "msfc/stitch.hpp"

namespace msfc {

enum class Procedure { Random, Line, FD, GP, HS };

const char* to_string(Procedure p);
Procedure parse_procedure(const std::string& s);

// Knobs shared by every mapping procedure and the simulator.
struct MethodParams {
  GraphOptions graph;
  SimOptions sim;
  BisectOptions bisect;
  ForceParams anneal;
  StitchParams stitch;
  double whitespace = 1.25;  // GP grid slack, cells per qubit
  int random_margin = 1;     // Random grid: ceil(sqrt(n)) + 2 * margin per side
};

struct MappedFactory {
  Circuit circuit;
  GridMapping mapping;
  std::vector<std::string> warnings;
};

// Builds the factory for `config` and maps it with `p`. `seed` drives the
// randomized procedures (Random, FD, HS midpoints).
MappedFactory map_factory(Procedure p, const FactoryConfig& config, const MethodParams& params, std::uint64_t seed);

struct ResultRow {
  int k = 0;
  int levels = 0;
  Procedure procedure = Procedure::Line;
  ReusePolicy reuse = ReusePolicy::NoReuse;
  std::uint64_t seed = 0;
  std::int64_t latency = 0;
  std::int64_t area = 0;
  std::int64_t volume = 0;
  double physical_volume = 0.0;  // 0 when the error model is out of range
  std::int64_t crossings = 0;
  double avg_edge_length = 0.0;
  std::int64_t critical_path = 0;
  double runtime_ms = 0.0;
  bool best = false;
  std::string error;  // non-empty marks an error row
};

// Simulates `mf` and fills every metric column.
ResultRow evaluate(const MappedFactory& mf, const FactoryConfig& config, const MethodParams& params);

struct ExperimentSpec {
  std::vector<std::pair<int, int>> points;  // (k, levels)
  std::vector<Procedure> procedures;
  std::vector<ReusePolicy> policies{ReusePolicy::NoReuse};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double eps_inject = 1e-4;
  double target_error = 1e-15;
  double budget_scale = 1.0;
  std::string out_dir = "results";
  int workers = 1;
  bool timing = false;  // adds runtime_ms (breaks byte-identical output)
};

void check_spec(const ExperimentSpec& spec);

// One row per point x procedure x policy x seed, canonically ordered, with
// the lowest-volume seed of each cell flagged as best.
std::vector<ResultRow> run(const ExperimentSpec& spec, const MethodParams& params);

struct CorrelationStudy {
  int samples = 0;
  std::vector<std::int64_t> latency;
  std::vector<double> length;
  std::vector<double> spacing;
  std::vector<double> crossings;
  std::optional<double> r_length;  // empty when a series has zero variance
  std::optional<double> r_spacing;
  std::optional<double> r_crossings;
};

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y);

CorrelationStudy correlation_study(int k, int levels, int samples, std::uint64_t seed, const MethodParams& params);

// "Line", "HS:R", "Line:NR". A missing policy picks the lowest volume.
struct Selector {
  Procedure procedure = Procedure::Line;
  std::optional<ReusePolicy> reuse;
};
Selector parse_selector(const std::string& s);
std::string to_string(const Selector& s);

struct RatioRow {
  int k = 0;
  int levels = 0;
  std::int64_t baseline_volume = 0;
  std::int64_t target_volume = 0;
  double ratio = 0.0;
};

struct CompareReport {
  Selector baseline;
  Selector target;
  std::vector<RatioRow> rows;
  double geometric_mean = 0.0;  // 0 with no rows
  std::vector<std::string> notes;
};

// Ratios of best-seed volumes per (k, levels) point.
CompareReport compare(const std::vector<ResultRow>& rows, const Selector& baseline, const Selector& target);

// Fixed column order: k,levels,procedure,reuse,seed,latency,area,volume,
// physical_volume,crossings,avg_edge_length,critical_path,best,error
// followed by runtime_ms when `timing` is set.
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows, bool timing = false);
std::vector<ResultRow> read_csv(std::istream& is);
std::string to_json(const std::vector<ResultRow>& rows, bool timing = false);
std::vector<ResultRow> rows_from_json(const std::string& text);
void write_correlation(std::ostream& os, const CorrelationStudy& s);
void write_compare(std::ostream& os, const CompareReport& r);

enum class EmitFormat { Csv, Json, PlotData };
// Writes results.csv, results.json or one series_<procedure>.dat per
// procedure into `dir`; returns the paths written.
std::vector<std::string> emit(const std::vector<ResultRow>& rows, EmitFormat format, const std::string& dir,
                              bool timing = false);

}  // namespace msfc
