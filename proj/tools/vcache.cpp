// vcache: placement, simulation and sweeps from scenario files.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vcache/experiment.hpp"

namespace fs = std::filesystem;
using namespace vcache;

namespace {

bool verbose() {
  const char* v = std::getenv("VCACHE_LOG");
  return v && (std::string(v) == "info" || std::string(v) == "debug");
}

void log(const std::string& msg) {
  if (verbose()) std::cerr << "[vcache] " << msg << '\n';
}

struct Common {
  std::string scenario;
  std::string out = ".";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<double> delta, intensity, precision;
  std::optional<std::int64_t> slots;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--scenario", c.scenario, "scenario file")->required()->check(CLI::ExistingFile);
  app->add_option("--out", c.out, "output directory");
  app->add_option("--set", c.overrides, "override, section.key=value (repeatable)");
  app->add_option("--seed", c.seed, "request and selection seed");
  app->add_option("--strategy", c.strategy, "linkshare|e2e|nearest|random|te|centralized");
  app->add_option("--delta", c.delta, "congestion-avoidance reserve");
  app->add_option("--intensity", c.intensity, "collaborative requests per slot");
  app->add_option("--slots", c.slots, "simulated slots");
  app->add_option("--precision", c.precision, "alpha precision for SRS");
}

ScenarioRecipe load(const Common& c) {
  auto overrides = c.overrides;
  if (c.seed) {
    overrides.push_back("seeds.requests=" + std::to_string(*c.seed));
    overrides.push_back("seeds.selection=" + std::to_string(mix_seed(*c.seed, 1) >> 1));
  }
  if (c.strategy) overrides.push_back("selection.strategy=" + *c.strategy);
  if (c.delta) overrides.push_back("selection.delta=" + detail::fmt(*c.delta));
  if (c.intensity) overrides.push_back("simulation.intensity=" + detail::fmt(*c.intensity));
  if (c.slots) overrides.push_back("simulation.slots=" + std::to_string(*c.slots));
  if (c.precision) overrides.push_back("placement.precision=" + detail::fmt(*c.precision));
  return parse_recipe(apply_overrides(read_file(c.scenario), overrides));
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(std::stod(item));
  return out;
}

Placement placement_for(const Scenario& s, const std::string& file) {
  if (!file.empty()) {
    std::istringstream in(read_file(file));
    return read_placement(in, s.topology.node_count(), static_cast<std::int32_t>(s.catalog.size()));
  }
  auto r = compute_placement(s);
  if (!r.feasible) throw std::runtime_error("placement infeasible: the catalog cannot be covered");
  return r.placement;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collaborative video caching: placement and source-selection experiments"};
  app.require_subcommand(1);

  Common gen_c, place_c, sim_c, sweep_c;
  auto* gen = app.add_subcommand("generate", "write catalog, demand matrix and request stream");
  add_common(gen, gen_c);

  auto* pl = app.add_subcommand("place", "solve placement; write placement, report and optional alpha scan");
  add_common(pl, place_c);
  bool with_bound = false;
  double alpha_step = 0.0;
  pl->add_flag("--bound", with_bound, "also compute the LP relaxation bound");
  pl->add_option("--alpha-step", alpha_step, "write H(alpha) on this grid to alpha_scan.csv");

  auto* sim = app.add_subcommand("simulate", "run the slot simulation; write metrics.csv and summary.json");
  add_common(sim, sim_c);
  std::string sim_placement;
  sim->add_option("--placement", sim_placement, "placement file (computed when absent)");

  auto* sw = app.add_subcommand("sweep", "simulate over a parameter grid, or the one-slot static grid");
  add_common(sw, sweep_c);
  std::string param = "delta", values = "0.1,0.2,0.3", strategies = "centralized,linkshare,e2e,nearest,random,te";
  std::size_t workers = 1, seeds = 20;
  bool static_mode = false;
  double background = 0.25;
  std::string sweep_placement;
  sw->add_option("--param", param, "delta|intensity|slots|seed");
  sw->add_option("--values", values, "comma-separated values");
  sw->add_option("--workers", workers, "parallel runs");
  sw->add_flag("--static", static_mode, "one-slot static scenario; --values are intensities");
  sw->add_option("--strategies", strategies, "static mode: strategies to compare");
  sw->add_option("--seeds", seeds, "static mode: seeds per intensity");
  sw->add_option("--background", background, "static mode: background load as a fraction of capacity");
  sw->add_option("--placement", sweep_placement, "placement file (computed when absent)");

  auto* rep = app.add_subcommand("report", "aggregate metrics CSVs into one table");
  std::string rep_in, rep_out = "report.csv";
  rep->add_option("--in", rep_in, "directory of metrics CSVs")->required()->check(CLI::ExistingDirectory);
  rep->add_option("--out", rep_out, "output table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto recipe = load(gen_c);
      const auto s = build_scenario(recipe);
      const fs::path out(gen_c.out);
      std::ostringstream cat, dem, req;
      cat << "# scenario_hash=" << scenario_hash(recipe) << "\nid,size_bytes,rate_bps\n";
      for (const auto& v : s.catalog) cat << v.id << ',' << detail::fmt(v.size_bytes) << ',' << detail::fmt(v.rate_bps) << '\n';
      dem << "# scenario_hash=" << scenario_hash(recipe) << "\n# one row per node, one column per video\n";
      for (NodeId i = 0; i < s.demand.nodes(); ++i) {
        for (VideoId k = 0; k < s.demand.videos(); ++k) dem << (k ? "," : "") << detail::fmt(s.demand(i, k));
        dem << '\n';
      }
      write_stream(req, generate_requests(s.demand, s.traffic.total_slots, s.traffic.intensity, s.seeds.requests,
                                          nullptr, s.traffic.slot_duration_s));
      write_file(out / "catalog.csv", cat.str());
      write_file(out / "demand.csv", dem.str());
      write_file(out / "requests.txt", "# scenario_hash=" + scenario_hash(recipe) + "\n" + req.str());
      log("generate: wrote catalog.csv, demand.csv, requests.txt");
    } else if (*pl) {
      const auto recipe = load(place_c);
      const auto s = build_scenario(recipe);
      const fs::path out(place_c.out);
      const auto r = place(s, with_bound);
      std::ostringstream ps;
      ps << "# scenario_hash=" << scenario_hash(recipe) << '\n';
      write_placement(ps, r.result.placement);
      write_file(out / "placement.txt", ps.str());
      nlohmann::json j;
      j["scenario_hash"] = scenario_hash(recipe);
      j["strategy"] = to_string(s.placement.strategy);
      j["feasible"] = r.result.feasible;
      j["alpha"] = r.result.alpha;
      j["objective"] = r.result.objective;
      j["hit_ratio"] = r.hit_ratio;
      j["capacity_ratio"] = s.capacity_ratio();
      j["seconds"] = r.seconds;
      if (r.bound) {
        j["lp_bound"] = *r.bound;
        j["bound_ratio"] = *r.bound > 0 ? r.result.objective / *r.bound : 1.0;
      }
      write_file(out / "place.json", j.dump(2) + "\n");
      if (alpha_step > 0.0) write_file(out / "alpha_scan.csv", alpha_scan_csv(s, alpha_step));
      std::cout << j.dump() << '\n';
      if (!r.result.feasible) return 2;
    } else if (*sim) {
      const auto recipe = load(sim_c);
      const auto s = build_scenario(recipe);
      const fs::path out(sim_c.out);
      const auto placement = placement_for(s, sim_placement);
      const auto series = run_simulation(s, placement);
      std::ostringstream csv;
      write_metrics_csv(csv, series, scenario_hash(recipe));
      write_file(out / "metrics.csv", csv.str());
      write_file(out / "summary.json", run_summary(scenario_hash(recipe), s.selection.strategy, series).dump(2) + "\n");
      log("simulate: " + std::to_string(series.rows.size()) + " slots");
    } else if (*sw) {
      const auto recipe = load(sweep_c);
      const auto s = build_scenario(recipe);
      const fs::path out(sweep_c.out);
      const auto placement = placement_for(s, sweep_placement);
      const auto vals = parse_list(values);
      if (static_mode) {
        std::vector<SelectionStrategy> st;
        std::stringstream ss(strategies);
        for (std::string item; std::getline(ss, item, ',');) st.push_back(parse_selection_strategy(item));
        const auto rows = static_grid(s, placement, vals, st, seeds, background, workers);
        write_file(out / "static.csv", "# scenario_hash=" + scenario_hash(recipe) + "\n" + static_csv(rows));
      } else {
        const auto pts = sweep(s, placement, param, vals, workers);
        for (const auto& p : pts) {
          std::ostringstream csv;
          write_metrics_csv(csv, p.series, scenario_hash(recipe));
          write_file(out / ("point_" + param + "_" + detail::fmt(p.value) + ".csv"), csv.str());
        }
        write_file(out / "sweep.csv", "# scenario_hash=" + scenario_hash(recipe) + "\n" + sweep_table_csv(pts));
      }
    } else if (*rep) {
      write_file(rep_out, report_table(rep_in));
    }
  } catch (const std::exception& e) {
    std::cerr << "vcache: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
