#pragma once

// Experiment drivers behind the command-line tool: placement with report,
// simulation with CSV and summary, parameter sweeps, static-scenario grids
// and CSV aggregation.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vcache/metrics.hpp"
#include "vcache/placement.hpp"
#include "vcache/scenario_io.hpp"
#include "vcache/sim.hpp"

namespace vcache {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

// Applies "section.key=value" overrides by appending them to the scenario
// text; a later assignment replaces an earlier one.
inline std::string apply_overrides(std::string text, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw std::invalid_argument("override '" + o + "' is not section.key=value");
    text += "\n[" + o.substr(0, dot) + "]\n" + o.substr(dot + 1, eq - dot - 1) + " = " + o.substr(eq + 1) + "\n";
  }
  return text;
}

inline PlacementResult compute_placement(const Scenario& s) {
  const auto prob = PlacementProblem::from(s);
  return s.placement.strategy == PlacementStrategy::srs ? srs(prob, s.placement.precision, s.placement.regret)
                                                        : irs(prob, s.placement.irs_step, s.placement.regret, s.placement.irs_fill);
}

struct PlacementReport {
  PlacementResult result;
  std::optional<double> bound;
  double hit_ratio = 0.0;
  double seconds = 0.0;
};

inline PlacementReport place(const Scenario& s, bool with_bound) {
  PlacementReport r;
  const auto t0 = std::chrono::steady_clock::now();
  r.result = compute_placement(s);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto prob = PlacementProblem::from(s);
  if (r.result.feasible) r.hit_ratio = hit_ratio(r.result.placement, prob);
  if (with_bound && static_cast<std::size_t>(prob.nodes()) * static_cast<std::size_t>(prob.videos()) <= lp::kMaxVariables)
    r.bound = lp_upper_bound(prob);
  return r;
}

inline std::string alpha_scan_csv(const Scenario& s, double step) {
  const auto prob = PlacementProblem::from(s);
  const double total = total_weight(prob);
  std::ostringstream os;
  os << "alpha,feasible,objective,hit_ratio\n";
  char buf[128];
  for (const auto& p : alpha_scan(prob, step, s.placement.regret)) {
    std::snprintf(buf, sizeof buf, "%.4f,%d,%.10g,%.10g\n", p.alpha, p.feasible ? 1 : 0, p.objective,
                  p.feasible ? p.objective / total : 0.0);
    os << buf;
  }
  return os.str();
}

// Runs `jobs` on up to `workers` threads; each job is independent.
inline void run_parallel(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  auto body = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

struct SweepPoint {
  std::string parameter;
  double value = 0.0;
  MetricsSeries series;
};

// One simulation per value of `parameter` (delta, intensity, slots or
// seed), all sharing one placement.
inline std::vector<SweepPoint> sweep(const Scenario& base, const Placement& placement, const std::string& parameter,
                                     const std::vector<double>& values, std::size_t workers) {
  std::vector<SweepPoint> out(values.size());
  run_parallel(values.size(), workers, [&](std::size_t i) {
    Scenario s = base;
    const double v = values[i];
    if (parameter == "delta") s.selection.delta = v;
    else if (parameter == "intensity") s.traffic.intensity = v;
    else if (parameter == "slots") s.traffic.total_slots = static_cast<std::int64_t>(v);
    else if (parameter == "seed") {
      s.seeds.requests = static_cast<std::uint64_t>(v);
      s.seeds.selection = mix_seed(static_cast<std::uint64_t>(v), 1);
    } else throw std::invalid_argument("cannot sweep '" + parameter + "'");
    out[i] = {parameter, v, run_simulation(s, placement)};
  });
  return out;
}

inline std::string sweep_table_csv(const std::vector<SweepPoint>& pts) {
  std::ostringstream os;
  os << "parameter,value,mean_max_utilization,mean_aggregate_cost,mean_throughput_bps,blocked,merged,hits,collaborative\n";
  char buf[256];
  for (const auto& p : pts) {
    const auto& m = p.series;
    std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%.10g,%lld,%lld,%lld,%lld\n", p.parameter.c_str(), p.value,
                  m.mean_max_utilization(), m.mean_aggregate_cost(), m.mean_throughput_bps(),
                  static_cast<long long>(m.total(&SlotMetrics::blocked_count)),
                  static_cast<long long>(m.total(&SlotMetrics::merged_count)),
                  static_cast<long long>(m.total(&SlotMetrics::hit_count)),
                  static_cast<long long>(m.total(&SlotMetrics::collaborative_count)));
    os << buf;
  }
  return os.str();
}

struct StaticRow {
  double intensity = 0.0;
  SelectionStrategy strategy = SelectionStrategy::linkshare;
  std::uint64_t seed = 0;
  double aggregate_cost = 0.0;
};

// The one-slot scenario over an intensity x strategy x seed grid, with every
// link pre-loaded to `background_fraction` of capacity.
inline std::vector<StaticRow> static_grid(const Scenario& s, const Placement& placement,
                                          const std::vector<double>& intensities,
                                          const std::vector<SelectionStrategy>& strategies, std::size_t seeds,
                                          double background_fraction, std::size_t workers) {
  std::vector<double> bg;
  for (const auto& l : s.topology.links()) bg.push_back(background_fraction * l.capacity_bps);
  std::vector<StaticRow> rows;
  for (double x : intensities)
    for (std::size_t q = 0; q < seeds; ++q)
      for (auto st : strategies) rows.push_back({x, st, mix_seed(s.seeds.requests, 1000 + q), 0.0});
  run_parallel(rows.size(), workers, [&](std::size_t i) {
    auto& r = rows[i];
    r.aggregate_cost = static_scenario(s, placement, r.intensity, r.strategy, r.seed, bg).aggregate_cost;
  });
  return rows;
}

inline std::string static_csv(const std::vector<StaticRow>& rows) {
  std::ostringstream os;
  os << "intensity,strategy,seed,aggregate_cost\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%s,%llu,%.10g\n", r.intensity, to_string(r.strategy),
                  static_cast<unsigned long long>(r.seed), r.aggregate_cost);
    os << buf;
  }
  return os.str();
}

// Column means of every metrics CSV under `dir`, one row per file.
inline std::string report_table(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::ostringstream os;
  os << "file,scenario_hash,rows,mean_max_utilization,mean_aggregate_cost,mean_throughput_bps,blocked,merged,hits,"
        "collaborative\n";
  char buf[256];
  for (const auto& f : files) {
    std::ifstream in(f);
    std::string line, hash;
    bool header = false;
    std::size_t n = 0;
    double util = 0, cost = 0, thr = 0;
    long long blocked = 0, merged = 0, hits = 0, collab = 0;
    while (std::getline(in, line)) {
      if (line.rfind("# scenario_hash=", 0) == 0) {
        hash = line.substr(16);
        continue;
      }
      if (!header) {
        if (line != kMetricsHeader) break;
        header = true;
        continue;
      }
      long long slot = 0, b = 0, m = 0, h = 0, c = 0;
      double u = 0, g = 0, t = 0;
      if (std::sscanf(line.c_str(), "%lld,%lf,%lf,%lf,%lld,%lld,%lld,%lld", &slot, &u, &g, &t, &b, &m, &h, &c) != 8)
        throw std::runtime_error(f.string() + ": malformed metrics row");
      ++n;
      util += u;
      cost += g;
      thr += t;
      blocked += b;
      merged += m;
      hits += h;
      collab += c;
    }
    if (!header) continue;
    const double d = n ? static_cast<double>(n) : 1.0;
    std::snprintf(buf, sizeof buf, ",%s,%zu,%.10g,%.10g,%.10g,%lld,%lld,%lld,%lld\n", hash.c_str(), n, util / d,
                  cost / d, thr / d, blocked, merged, hits, collab);
    os << std::filesystem::relative(f, dir).generic_string() << buf;
  }
  return os.str();
}

}  // namespace vcache
