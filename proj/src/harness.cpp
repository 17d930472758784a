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
#include "msfc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "msfc/error.hpp"

namespace msfc {

const char* to_string(Procedure p) {
  switch (p) {
    case Procedure::Random: return "Random";
    case Procedure::Line: return "Line";
    case Procedure::FD: return "FD";
    case Procedure::GP: return "GP";
    case Procedure::HS: return "HS";
  }
  return "?";
}

Procedure parse_procedure(const std::string& s) {
  for (Procedure p : {Procedure::Random, Procedure::Line, Procedure::FD, Procedure::GP, Procedure::HS})
    if (s == to_string(p)) return p;
  throw ParseError("unknown procedure '" + s + "' (Random, Line, FD, GP, HS)");
}

MappedFactory map_factory(Procedure p, const FactoryConfig& config, const MethodParams& params, std::uint64_t seed) {
  validate(config);
  MappedFactory out;
  if (p == Procedure::HS) {
    StitchParams sp = params.stitch;
    sp.reuse = config.reuse_policy;
    sp.seed = seed;
    StitchPlan plan = stitch_factory(config, sp);
    out.circuit = std::move(plan.circuit);
    out.mapping = std::move(plan.mapping);
    out.warnings = std::move(plan.warnings);
    return out;
  }
  out.circuit = build_factory(config);
  const Circuit& c = out.circuit;
  switch (p) {
    case Procedure::Random: {
      if (params.random_margin < 0) throw InvalidArgument("random_margin must be non-negative");
      const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(c.qubits.size())) - 1e-9)) +
                       2 * params.random_margin;
      out.mapping = random_mapping(c, side, side, seed);
      break;
    }
    case Procedure::Line: out.mapping = linear_mapping(c); break;
    case Procedure::FD: {
      ForceParams f = params.anneal;
      f.seed = seed;
      out.mapping = anneal(linear_mapping(c), c, f);
      break;
    }
    case Procedure::GP: {
      const auto [w, h] = padded_dims(c.qubits.size(), params.whitespace);
      out.mapping = embed(from_circuit(c, params.graph), w, h, params.bisect);
      break;
    }
    case Procedure::HS: break;
  }
  return out;
}

ResultRow evaluate(const MappedFactory& mf, const FactoryConfig& config, const MethodParams& params) {
  SimReport rep = simulate(mf.circuit, mf.mapping, params.sim);
  ResultRow row;
  row.k = config.capacity_k;
  row.levels = config.levels_l;
  row.reuse = config.reuse_policy;
  row.seed = config.seed;
  row.latency = rep.latency;
  row.area = rep.area;
  row.volume = rep.volume;
  row.critical_path = rep.critical_path;
  try {
    attach_physical(rep, config, build_error_model(config));
    row.physical_volume = rep.physical_volume;
  } catch (const Error&) {
    row.physical_volume = 0.0;
  }
  const MetricReport mr = metrics(mf.mapping, from_circuit(mf.circuit, params.graph));
  row.crossings = mr.crossing_count;
  row.avg_edge_length = mr.avg_edge_length;
  return row;
}

void check_spec(const ExperimentSpec& spec) {
  if (spec.points.empty()) throw InvalidArgument("experiment needs at least one (k, levels) point");
  if (spec.procedures.empty()) throw InvalidArgument("experiment needs at least one procedure");
  if (spec.policies.empty()) throw InvalidArgument("experiment needs at least one reuse policy");
  if (spec.seeds.empty()) throw InvalidArgument("experiment needs at least one seed");
  if (spec.workers < 1) throw InvalidArgument("workers must be >= 1");
  for (auto [k, l] : spec.points)
    if (k < 1 || l < 1) throw InvalidArgument("points need k >= 1 and levels >= 1");
}

namespace {

auto row_key(const ResultRow& r) {
  return std::make_tuple(r.k, r.levels, static_cast<int>(r.procedure), static_cast<int>(r.reuse), r.seed);
}

void flag_best(std::vector<ResultRow>& rows) {
  std::map<std::tuple<int, int, int, int>, std::size_t> best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ResultRow& r = rows[i];
    r.best = false;
    if (!r.error.empty()) continue;
    const auto key = std::make_tuple(r.k, r.levels, static_cast<int>(r.procedure), static_cast<int>(r.reuse));
    const auto it = best.find(key);
    if (it == best.end() || r.volume < rows[it->second].volume) best[key] = i;
  }
  for (const auto& [key, i] : best) rows[i].best = true;
}

}  // namespace

std::vector<ResultRow> run(const ExperimentSpec& spec, const MethodParams& params) {
  check_spec(spec);
  struct Cell {
    int k, levels;
    Procedure procedure;
    ReusePolicy reuse;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (auto [k, l] : spec.points)
    for (Procedure p : spec.procedures)
      for (ReusePolicy r : spec.policies)
        for (std::uint64_t s : spec.seeds) cells.push_back({k, l, p, r, s});
  std::vector<ResultRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& cell = cells[i];
      FactoryConfig fc;
      fc.capacity_k = cell.k;
      fc.levels_l = cell.levels;
      fc.eps_inject = spec.eps_inject;
      fc.target_error = spec.target_error;
      fc.budget_scale = spec.budget_scale;
      fc.reuse_policy = cell.reuse;
      fc.seed = cell.seed;
      ResultRow row;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        row = evaluate(map_factory(cell.procedure, fc, params, cell.seed), fc, params);
      } catch (const std::exception& e) {
        row = ResultRow{};
        row.error = e.what();
        if (row.error.empty()) row.error = "error";
      }
      row.k = cell.k;
      row.levels = cell.levels;
      row.procedure = cell.procedure;
      row.reuse = cell.reuse;
      row.seed = cell.seed;
      if (spec.timing)
        row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      rows[i] = std::move(row);
    }
  };
  const int n = std::min<int>(spec.workers, static_cast<int>(cells.size()));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) { return row_key(a) < row_key(b); });
  flag_best(rows);
  return rows;
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("pearson needs equal-length series");
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

CorrelationStudy correlation_study(int k, int levels, int samples, std::uint64_t seed, const MethodParams& params) {
  if (samples < 10) throw InvalidArgument("correlation study needs at least 10 samples");
  FactoryConfig fc;
  fc.capacity_k = k;
  fc.levels_l = levels;
  const Circuit c = build_factory(fc);
  const InteractionGraph g = from_circuit(c, params.graph);
  const int side = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(c.qubits.size())) - 1e-9)) +
                   2 * params.random_margin;
  CorrelationStudy s;
  s.samples = samples;
  for (int i = 0; i < samples; ++i) {
    const GridMapping m = random_mapping(c, side, side, seed + static_cast<std::uint64_t>(i));
    const MetricReport mr = metrics(m, g);
    s.latency.push_back(simulate(c, m, params.sim).latency);
    s.length.push_back(mr.avg_edge_length);
    s.spacing.push_back(mr.avg_edge_spacing);
    s.crossings.push_back(static_cast<double>(mr.crossing_count));
  }
  const std::vector<double> lat(s.latency.begin(), s.latency.end());
  s.r_length = pearson(s.length, lat);
  s.r_spacing = pearson(s.spacing, lat);
  s.r_crossings = pearson(s.crossings, lat);
  return s;
}

Selector parse_selector(const std::string& s) {
  Selector out;
  const auto colon = s.find(':');
  out.procedure = parse_procedure(s.substr(0, colon));
  if (colon != std::string::npos) {
    const std::string pol = s.substr(colon + 1);
    if (pol == "R" || pol == "Reuse") out.reuse = ReusePolicy::Reuse;
    else if (pol == "NR" || pol == "NoReuse") out.reuse = ReusePolicy::NoReuse;
    else throw ParseError("unknown reuse tag '" + pol + "' (R, NR)");
  }
  return out;
}

std::string to_string(const Selector& s) {
  std::string out = to_string(s.procedure);
  if (s.reuse) out += *s.reuse == ReusePolicy::Reuse ? ":R" : ":NR";
  return out;
}

CompareReport compare(const std::vector<ResultRow>& rows, const Selector& baseline, const Selector& target) {
  CompareReport rep;
  rep.baseline = baseline;
  rep.target = target;
  std::vector<std::pair<int, int>> points;
  for (const auto& r : rows) points.emplace_back(r.k, r.levels);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  auto pick = [&](int k, int l, const Selector& sel) -> const ResultRow* {
    const ResultRow* best = nullptr;
    for (const auto& r : rows) {
      if (r.k != k || r.levels != l || r.procedure != sel.procedure || !r.error.empty()) continue;
      if (sel.reuse && r.reuse != *sel.reuse) continue;
      if (!best || r.volume < best->volume) best = &r;
    }
    return best;
  };
  double log_sum = 0.0;
  for (auto [k, l] : points) {
    const ResultRow* b = pick(k, l, baseline);
    const ResultRow* t = pick(k, l, target);
    if (!b || !t || t->volume <= 0) {
      rep.notes.push_back("k=" + std::to_string(k) + " levels=" + std::to_string(l) + ": missing " +
                          (!b ? to_string(baseline) : to_string(target)));
      continue;
    }
    RatioRow rr{k, l, b->volume, t->volume, static_cast<double>(b->volume) / static_cast<double>(t->volume)};
    log_sum += std::log(rr.ratio);
    rep.rows.push_back(rr);
  }
  if (!rep.rows.empty()) rep.geometric_mean = std::exp(log_sum / static_cast<double>(rep.rows.size()));
  return rep;
}

namespace {

const char* const kColumns[] = {"k",         "levels",          "procedure",     "reuse",
                                "seed",      "latency",         "area",          "volume",
                                "physical_volume", "crossings", "avg_edge_length", "critical_path",
                                "best",      "error"};

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(10) << v;
  return ss.str();
}

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows, bool timing) {
  for (std::size_t i = 0; i < std::size(kColumns); ++i) os << (i ? "," : "") << kColumns[i];
  if (timing) os << ",runtime_ms";
  os << '\n';
  for (const auto& r : rows) {
    os << r.k << ',' << r.levels << ',' << to_string(r.procedure) << ',' << to_string(r.reuse) << ',' << r.seed << ','
       << r.latency << ',' << r.area << ',' << r.volume << ',' << fmt(r.physical_volume) << ',' << r.crossings << ','
       << fmt(r.avg_edge_length) << ',' << r.critical_path << ',' << (r.best ? 1 : 0) << ',' << sanitize(r.error);
    if (timing) os << ',' << fmt(r.runtime_ms);
    os << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("empty results CSV");
  const std::vector<std::string> header = split_csv(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* name : kColumns)
    if (!col.count(name)) throw ParseError(std::string("results CSV lacks column ") + name);
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = split_csv(line);
    if (f.size() != header.size()) throw ParseError("results CSV line " + std::to_string(lineno) + ": wrong field count");
    auto at = [&](const char* name) -> const std::string& { return f[col.at(name)]; };
    try {
      ResultRow r;
      r.k = std::stoi(at("k"));
      r.levels = std::stoi(at("levels"));
      r.procedure = parse_procedure(at("procedure"));
      r.reuse = parse_reuse(at("reuse"));
      r.seed = std::stoull(at("seed"));
      r.latency = std::stoll(at("latency"));
      r.area = std::stoll(at("area"));
      r.volume = std::stoll(at("volume"));
      r.physical_volume = std::stod(at("physical_volume"));
      r.crossings = std::stoll(at("crossings"));
      r.avg_edge_length = std::stod(at("avg_edge_length"));
      r.critical_path = std::stoll(at("critical_path"));
      r.best = at("best") == "1";
      r.error = at("error");
      if (col.count("runtime_ms")) r.runtime_ms = std::stod(f[col.at("runtime_ms")]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw ParseError("results CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

std::string to_json(const std::vector<ResultRow>& rows, bool timing) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json o = {{"k", r.k},
                        {"levels", r.levels},
                        {"procedure", to_string(r.procedure)},
                        {"reuse", to_string(r.reuse)},
                        {"seed", r.seed},
                        {"latency", r.latency},
                        {"area", r.area},
                        {"volume", r.volume},
                        {"physical_volume", r.physical_volume},
                        {"crossings", r.crossings},
                        {"avg_edge_length", r.avg_edge_length},
                        {"critical_path", r.critical_path},
                        {"best", r.best},
                        {"error", r.error}};
    if (timing) o["runtime_ms"] = r.runtime_ms;
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::vector<ResultRow> rows_from_json(const std::string& text) {
  std::vector<ResultRow> rows;
  try {
    const nlohmann::json arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw ParseError("results JSON must be an array");
    for (const auto& o : arr) {
      ResultRow r;
      r.k = o.at("k").get<int>();
      r.levels = o.at("levels").get<int>();
      r.procedure = parse_procedure(o.at("procedure").get<std::string>());
      r.reuse = parse_reuse(o.at("reuse").get<std::string>());
      r.seed = o.at("seed").get<std::uint64_t>();
      r.latency = o.at("latency").get<std::int64_t>();
      r.area = o.at("area").get<std::int64_t>();
      r.volume = o.at("volume").get<std::int64_t>();
      r.physical_volume = o.at("physical_volume").get<double>();
      r.crossings = o.at("crossings").get<std::int64_t>();
      r.avg_edge_length = o.at("avg_edge_length").get<double>();
      r.critical_path = o.at("critical_path").get<std::int64_t>();
      r.best = o.at("best").get<bool>();
      r.error = o.at("error").get<std::string>();
      if (o.contains("runtime_ms")) r.runtime_ms = o.at("runtime_ms").get<double>();
      rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("results JSON: ") + e.what());
  }
  return rows;
}

void write_correlation(std::ostream& os, const CorrelationStudy& s) {
  auto r = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("undefined"); };
  os << "metric,r\n"
     << "avg_edge_length," << r(s.r_length) << '\n'
     << "avg_edge_spacing," << r(s.r_spacing) << '\n'
     << "crossing_count," << r(s.r_crossings) << '\n';
}

void write_compare(std::ostream& os, const CompareReport& r) {
  os << "k,levels,baseline,target,baseline_volume,target_volume,ratio\n";
  for (const auto& row : r.rows)
    os << row.k << ',' << row.levels << ',' << to_string(r.baseline) << ',' << to_string(r.target) << ','
       << row.baseline_volume << ',' << row.target_volume << ',' << fmt(row.ratio) << '\n';
  os << "# geometric_mean " << fmt(r.geometric_mean) << '\n';
  for (const auto& n : r.notes) os << "# " << n << '\n';
}

std::vector<std::string> emit(const std::vector<ResultRow>& rows, EmitFormat format, const std::string& dir, bool timing) {
  if (rows.empty()) throw InvalidArgument("nothing to emit: result table is empty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    written.push_back(path);
    return out;
  };
  auto close = [&](std::ofstream& out) {
    out.flush();
    if (!out) throw IoError("write failed for " + written.back());
  };
  switch (format) {
    case EmitFormat::Csv: {
      auto out = open("results.csv");
      write_csv(out, rows, timing);
      close(out);
      break;
    }
    case EmitFormat::Json: {
      auto out = open("results.json");
      out << to_json(rows, timing);
      close(out);
      break;
    }
    case EmitFormat::PlotData: {
      std::vector<Procedure> procs;
      for (const auto& r : rows)
        if (std::find(procs.begin(), procs.end(), r.procedure) == procs.end()) procs.push_back(r.procedure);
      std::sort(procs.begin(), procs.end());
      for (Procedure p : procs) {
        auto out = open(std::string("series_") + to_string(p) + ".dat");
        out << "# k levels reuse volume latency area\n";
        for (const auto& r : rows)
          if (r.procedure == p && r.best)
            out << r.k << ' ' << r.levels << ' ' << to_string(r.reuse) << ' ' << r.volume << ' ' << r.latency << ' '
                << r.area << '\n';
        close(out);
      }
      break;
    }
  }
  return written;
}

}  // namespace msfc
