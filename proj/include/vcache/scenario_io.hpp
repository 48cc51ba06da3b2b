#pragma once

// Scenario files: INI-style sections of `key = value` lines, '#' comments.
//
//   [catalog]    videos, size_min, size_max, rate, sizes (explicit list)
//   [topology]   routers, nodes_per_router, core_capacity, edge_capacity;
//                or nodes plus repeated `link = <end> <end> <rate>` lines
//                (ends are rN or nN) and optional `route = j i l1 l2 ...`
//   [capacity]   node_capacity | node_capacity_min + node_capacity_max |
//                capacity_ratio; per-node `node.<i>` overrides
//   [demand]     zipf_min, zipf_max, population_min, population_max;
//                or explicit `row.<i> = v0 v1 ...`
//   [placement]  strategy (srs|irs), precision, irs_step, irs_fill, regret
//   [selection]  strategy, round_slots, report_slots, reschedule_slots,
//                delta, gamma, epsilon, background_fraction
//   [simulation] slots, slot_duration, intensity
//   [seeds]      catalog, demand, requests, selection
//
// Storage accepts B/KB/MB/GB/TB (decimal), rates bps/Kbps/Mbps/Gbps.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vcache/metrics.hpp"
#include "vcache/model.hpp"
#include "vcache/units.hpp"
#include "vcache/workload.hpp"

namespace vcache {

struct ScenarioError : std::runtime_error {
  ScenarioError(std::size_t line, const std::string& msg)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line(line) {}
  std::size_t line;
};

struct LinkSpec {
  Endpoint a, b;
  double capacity_bps = 0.0;
  friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

// Everything a scenario file says, before anything random is drawn.
struct ScenarioRecipe {
  // catalog
  std::int32_t videos = 0;
  Range size_bytes{20 * units::MB, 400 * units::MB};
  double rate_bps = 128 * units::Kbps;
  std::vector<double> explicit_sizes;
  // topology
  std::int32_t routers = 8;
  std::int32_t nodes_per_router = 7;
  double core_bps = 10 * units::Gbps;
  double edge_bps = 1 * units::Gbps;
  std::int32_t custom_nodes = 0;  // > 0 selects the custom link list
  std::vector<LinkSpec> links;
  std::vector<std::pair<std::pair<NodeId, NodeId>, Path>> routes;
  // capacity
  std::optional<double> node_capacity;
  std::optional<Range> node_capacity_range;
  std::optional<double> capacity_ratio;
  std::map<NodeId, double> node_overrides;
  // demand
  Range zipf{0.7, 0.9};
  Range population{20, 30};
  std::map<NodeId, std::vector<double>> rows;

  PlacementConfig placement;
  SelectionConfig selection;
  double background_fraction = 0.0;
  TrafficConfig traffic;
  Seeds seeds;

  friend bool operator==(const ScenarioRecipe&, const ScenarioRecipe&) = default;
};

inline const char* to_string(PlacementStrategy s) { return s == PlacementStrategy::srs ? "srs" : "irs"; }
inline const char* to_string(RegretRule r) { return r == RegretRule::max_regret ? "max_regret" : "min_difference"; }

inline SelectionStrategy parse_selection_strategy(const std::string& s) {
  if (s == "linkshare") return SelectionStrategy::linkshare;
  if (s == "e2e") return SelectionStrategy::e2e;
  if (s == "nearest" || s == "ns") return SelectionStrategy::nearest;
  if (s == "random") return SelectionStrategy::random;
  if (s == "te") return SelectionStrategy::te;
  if (s == "centralized") return SelectionStrategy::centralized;
  throw std::invalid_argument("unknown selection strategy '" + s + "'");
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Endpoint parse_endpoint(const std::string& w) {
  if (w.size() < 2 || (w[0] != 'r' && w[0] != 'n')) throw std::invalid_argument("endpoint '" + w + "' is not rN or nN");
  std::size_t used = 0;
  const int idx = std::stoi(w.substr(1), &used);
  if (used != w.size() - 1 || idx < 0) throw std::invalid_argument("bad endpoint index in '" + w + "'");
  return w[0] == 'r' ? Endpoint::router(idx) : Endpoint::node(idx);
}

inline std::string endpoint_text(const Endpoint& e) {
  return (e.kind == Endpoint::Kind::router ? "r" : "n") + std::to_string(e.index);
}

}  // namespace detail

inline ScenarioRecipe parse_recipe(const std::string& text) {
  ScenarioRecipe r;
  std::istringstream is(text);
  std::string raw, section;
  std::size_t lineno = 0;
  bool has_videos = false, has_topology_links = false;
  std::optional<double> cap_min, cap_max;

  auto to_int = [&](const std::string& v) -> std::int64_t {
    std::size_t used = 0;
    const auto x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("expected an integer, got '" + v + "'");
    return x;
  };
  auto to_double = [&](const std::string& v) -> double {
    std::size_t used = 0;
    const auto x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("expected a number, got '" + v + "'");
    return x;
  };
  auto indexed = [&](const std::string& key, const std::string& prefix) -> std::optional<std::int32_t> {
    if (key.rfind(prefix, 0) != 0) return std::nullopt;
    return static_cast<std::int32_t>(to_int(key.substr(prefix.size())));
  };

  while (std::getline(is, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const auto line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ScenarioError(lineno, "unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"catalog", "topology", "capacity", "demand",
                                    "placement", "selection", "simulation", "seeds"};
      bool ok = false;
      for (auto* k : known) ok = ok || section == k;
      if (!ok) throw ScenarioError(lineno, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ScenarioError(lineno, "expected 'key = value'");
    const auto key = detail::trim(line.substr(0, eq));
    const auto val = detail::trim(line.substr(eq + 1));
    if (section.empty()) throw ScenarioError(lineno, "key '" + key + "' outside any section");
    if (val.empty()) throw ScenarioError(lineno, "empty value for '" + key + "'");
    try {
      bool handled = true;
      if (section == "catalog") {
        if (key == "videos") { r.videos = static_cast<std::int32_t>(to_int(val)); has_videos = true; }
        else if (key == "size_min") r.size_bytes.lo = units::parse_bytes(val);
        else if (key == "size_max") r.size_bytes.hi = units::parse_bytes(val);
        else if (key == "rate") r.rate_bps = units::parse_bps(val);
        else if (key == "sizes") {
          r.explicit_sizes.clear();
          for (const auto& w : detail::words(val)) r.explicit_sizes.push_back(units::parse_bytes(w));
        } else handled = false;
      } else if (section == "topology") {
        if (key == "routers") r.routers = static_cast<std::int32_t>(to_int(val));
        else if (key == "nodes_per_router") r.nodes_per_router = static_cast<std::int32_t>(to_int(val));
        else if (key == "core_capacity") r.core_bps = units::parse_bps(val);
        else if (key == "edge_capacity") r.edge_bps = units::parse_bps(val);
        else if (key == "nodes") r.custom_nodes = static_cast<std::int32_t>(to_int(val));
        else if (key == "link") {
          const auto w = detail::words(val);
          if (w.size() != 3) throw std::invalid_argument("link needs '<end> <end> <rate>'");
          r.links.push_back({detail::parse_endpoint(w[0]), detail::parse_endpoint(w[1]), units::parse_bps(w[2])});
          has_topology_links = true;
        } else if (key == "route") {
          const auto w = detail::words(val);
          if (w.size() < 3) throw std::invalid_argument("route needs 'j i l1 [l2 ...]'");
          Path p;
          for (std::size_t q = 2; q < w.size(); ++q) p.push_back(static_cast<LinkId>(to_int(w[q])));
          r.routes.push_back({{static_cast<NodeId>(to_int(w[0])), static_cast<NodeId>(to_int(w[1]))}, p});
        } else handled = false;
      } else if (section == "capacity") {
        if (key == "node_capacity") r.node_capacity = units::parse_bytes(val);
        else if (key == "node_capacity_min") cap_min = units::parse_bytes(val);
        else if (key == "node_capacity_max") cap_max = units::parse_bytes(val);
        else if (key == "capacity_ratio") r.capacity_ratio = to_double(val);
        else if (auto i = indexed(key, "node.")) r.node_overrides[*i] = units::parse_bytes(val);
        else handled = false;
      } else if (section == "demand") {
        if (key == "zipf_min") r.zipf.lo = to_double(val);
        else if (key == "zipf_max") r.zipf.hi = to_double(val);
        else if (key == "population_min") r.population.lo = to_double(val);
        else if (key == "population_max") r.population.hi = to_double(val);
        else if (auto i = indexed(key, "row.")) {
          std::vector<double> row;
          for (const auto& w : detail::words(val)) row.push_back(to_double(w));
          r.rows[*i] = row;
        } else handled = false;
      } else if (section == "placement") {
        if (key == "strategy") {
          if (val == "srs") r.placement.strategy = PlacementStrategy::srs;
          else if (val == "irs") r.placement.strategy = PlacementStrategy::irs;
          else throw std::invalid_argument("placement strategy must be srs or irs");
        } else if (key == "precision") r.placement.precision = to_double(val);
        else if (key == "irs_step") r.placement.irs_step = to_double(val);
        else if (key == "irs_fill") {
          if (val != "true" && val != "false") throw std::invalid_argument("irs_fill must be true or false");
          r.placement.irs_fill = val == "true";
        }
        else if (key == "regret") {
          if (val == "max_regret") r.placement.regret = RegretRule::max_regret;
          else if (val == "min_difference") r.placement.regret = RegretRule::min_difference;
          else throw std::invalid_argument("regret must be max_regret or min_difference");
        } else handled = false;
      } else if (section == "selection") {
        if (key == "strategy") r.selection.strategy = parse_selection_strategy(val);
        else if (key == "round_slots") r.selection.round_len_slots = to_int(val);
        else if (key == "report_slots") r.selection.report_period_slots = to_int(val);
        else if (key == "reschedule_slots") r.selection.reschedule_period_slots = to_int(val);
        else if (key == "delta") r.selection.delta = to_double(val);
        else if (key == "gamma") r.selection.gamma = to_double(val);
        else if (key == "epsilon") r.selection.epsilon = to_double(val);
        else if (key == "background_fraction") r.background_fraction = to_double(val);
        else handled = false;
      } else if (section == "simulation") {
        if (key == "slots") r.traffic.total_slots = to_int(val);
        else if (key == "slot_duration") r.traffic.slot_duration_s = to_double(val);
        else if (key == "intensity") r.traffic.intensity = to_double(val);
        else handled = false;
      } else if (section == "seeds") {
        const auto v = static_cast<std::uint64_t>(to_int(val));
        if (key == "catalog") r.seeds.catalog = v;
        else if (key == "demand") r.seeds.demand = v;
        else if (key == "requests") r.seeds.requests = v;
        else if (key == "selection") r.seeds.selection = v;
        else handled = false;
      }
      if (!handled) throw ScenarioError(lineno, "unknown key '" + key + "' in [" + section + "]");
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& e) {
      throw ScenarioError(lineno, key + ": " + e.what());
    }
  }

  if (cap_min || cap_max) {
    if (!(cap_min && cap_max)) throw ScenarioError(0, "capacity: node_capacity_min and node_capacity_max go together");
    r.node_capacity_range = Range{*cap_min, *cap_max};
  }
  if (!has_videos && r.explicit_sizes.empty()) throw ScenarioError(0, "catalog: missing field 'videos'");
  if (!r.explicit_sizes.empty()) {
    if (has_videos && r.videos != static_cast<std::int32_t>(r.explicit_sizes.size()))
      throw ScenarioError(0, "catalog: 'videos' disagrees with the length of 'sizes'");
    r.videos = static_cast<std::int32_t>(r.explicit_sizes.size());
  }
  const int capacity_modes = (r.node_capacity ? 1 : 0) + (r.node_capacity_range ? 1 : 0) + (r.capacity_ratio ? 1 : 0);
  if (capacity_modes == 0)
    throw ScenarioError(0, "capacity: missing field 'node_capacity' (or node_capacity_min/max, or capacity_ratio)");
  if (capacity_modes > 1) throw ScenarioError(0, "capacity: give exactly one of node_capacity, a min/max range, or capacity_ratio");
  if (has_topology_links != (r.custom_nodes > 0))
    throw ScenarioError(0, "topology: a custom graph needs both 'nodes' and 'link' entries");
  return r;
}

inline std::string serialize_recipe(const ScenarioRecipe& r) {
  using detail::fmt;
  std::ostringstream os;
  os << "[catalog]\n";
  if (r.explicit_sizes.empty()) {
    os << "videos = " << r.videos << "\nsize_min = " << fmt(r.size_bytes.lo) << "\nsize_max = " << fmt(r.size_bytes.hi)
       << '\n';
  } else {
    os << "sizes =";
    for (double s : r.explicit_sizes) os << ' ' << fmt(s);
    os << '\n';
  }
  os << "rate = " << fmt(r.rate_bps) << "\n\n[topology]\n";
  if (r.custom_nodes > 0) {
    os << "routers = " << r.routers << "\nnodes = " << r.custom_nodes << '\n';
    for (const auto& l : r.links)
      os << "link = " << detail::endpoint_text(l.a) << ' ' << detail::endpoint_text(l.b) << ' ' << fmt(l.capacity_bps)
         << '\n';
    for (const auto& [key, p] : r.routes) {
      os << "route = " << key.first << ' ' << key.second;
      for (LinkId l : p) os << ' ' << l;
      os << '\n';
    }
  } else {
    os << "routers = " << r.routers << "\nnodes_per_router = " << r.nodes_per_router
       << "\ncore_capacity = " << fmt(r.core_bps) << "\nedge_capacity = " << fmt(r.edge_bps) << '\n';
  }
  os << "\n[capacity]\n";
  if (r.node_capacity) os << "node_capacity = " << fmt(*r.node_capacity) << '\n';
  if (r.node_capacity_range)
    os << "node_capacity_min = " << fmt(r.node_capacity_range->lo) << "\nnode_capacity_max = "
       << fmt(r.node_capacity_range->hi) << '\n';
  if (r.capacity_ratio) os << "capacity_ratio = " << fmt(*r.capacity_ratio) << '\n';
  for (const auto& [i, c] : r.node_overrides) os << "node." << i << " = " << fmt(c) << '\n';
  os << "\n[demand]\nzipf_min = " << fmt(r.zipf.lo) << "\nzipf_max = " << fmt(r.zipf.hi)
     << "\npopulation_min = " << fmt(r.population.lo) << "\npopulation_max = " << fmt(r.population.hi) << '\n';
  for (const auto& [i, row] : r.rows) {
    os << "row." << i << " =";
    for (double v : row) os << ' ' << fmt(v);
    os << '\n';
  }
  os << "\n[placement]\nstrategy = " << to_string(r.placement.strategy) << "\nprecision = " << fmt(r.placement.precision)
     << "\nirs_step = " << fmt(r.placement.irs_step)
     << "\nirs_fill = " << (r.placement.irs_fill ? "true" : "false") << "\nregret = " << to_string(r.placement.regret) << '\n';
  const auto& s = r.selection;
  os << "\n[selection]\nstrategy = " << to_string(s.strategy) << "\nround_slots = " << s.round_len_slots
     << "\nreport_slots = " << s.report_period_slots << "\nreschedule_slots = " << s.reschedule_period_slots
     << "\ndelta = " << fmt(s.delta) << "\ngamma = " << fmt(s.gamma) << "\nepsilon = " << fmt(s.epsilon)
     << "\nbackground_fraction = " << fmt(r.background_fraction) << '\n';
  os << "\n[simulation]\nslots = " << r.traffic.total_slots << "\nslot_duration = " << fmt(r.traffic.slot_duration_s)
     << "\nintensity = " << fmt(r.traffic.intensity) << '\n';
  os << "\n[seeds]\ncatalog = " << r.seeds.catalog << "\ndemand = " << r.seeds.demand << "\nrequests = " << r.seeds.requests
     << "\nselection = " << r.seeds.selection << '\n';
  return os.str();
}

// FNV-1a over the canonical serialization, as 16 hex digits.
inline std::string scenario_hash(const ScenarioRecipe& r) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_recipe(r)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Scenario build_scenario(const ScenarioRecipe& r) {
  Scenario s;
  if (r.explicit_sizes.empty()) {
    s.catalog = generate_catalog(r.videos, r.size_bytes, r.rate_bps, r.seeds.catalog);
  } else {
    for (std::size_t k = 0; k < r.explicit_sizes.size(); ++k)
      s.catalog.push_back({static_cast<VideoId>(k), r.explicit_sizes[k], r.rate_bps, 1});
  }
  double total_size = 0.0;
  for (const auto& v : s.catalog) total_size += v.size_bytes;

  std::int32_t nodes = 0;
  if (r.custom_nodes > 0) {
    nodes = r.custom_nodes;
  } else {
    if (r.routers < 1 || r.nodes_per_router < 1) throw ScenarioError(0, "topology: routers and nodes_per_router must be >= 1");
    nodes = r.routers * r.nodes_per_router;
  }
  std::vector<double> caps(static_cast<std::size_t>(nodes), 0.0);
  if (r.node_capacity) {
    std::fill(caps.begin(), caps.end(), *r.node_capacity);
  } else if (r.capacity_ratio) {
    if (!(*r.capacity_ratio > 0.0)) throw ScenarioError(0, "capacity: capacity_ratio must be positive");
    std::fill(caps.begin(), caps.end(), std::floor(total_size / *r.capacity_ratio / nodes));
  } else {
    Rng rng(mix_seed(r.seeds.catalog, 5));
    std::uniform_real_distribution<double> u(r.node_capacity_range->lo, r.node_capacity_range->hi);
    for (auto& c : caps) c = std::round(u(rng));
  }
  for (const auto& [i, c] : r.node_overrides) {
    if (i < 0 || i >= nodes) throw ScenarioError(0, "capacity: node." + std::to_string(i) + " does not exist");
    caps[static_cast<std::size_t>(i)] = c;
  }

  try {
    if (r.custom_nodes > 0) {
      std::vector<Link> links;
      std::vector<RouterId> attach(static_cast<std::size_t>(nodes), -1);
      for (const auto& l : r.links) {
        links.push_back({static_cast<LinkId>(links.size()), l.capacity_bps, l.a, l.b});
        for (auto [n, other] : {std::pair{l.a, l.b}, std::pair{l.b, l.a}})
          if (n.kind == Endpoint::Kind::node && other.kind == Endpoint::Kind::router && n.index >= 0 &&
              n.index < nodes && attach[static_cast<std::size_t>(n.index)] < 0)
            attach[static_cast<std::size_t>(n.index)] = other.index;
      }
      std::vector<ServingNode> sn;
      for (NodeId i = 0; i < nodes; ++i) sn.push_back({i, caps[static_cast<std::size_t>(i)], std::max(0, attach[static_cast<std::size_t>(i)])});
      RouteOverrides ov;
      for (const auto& [key, p] : r.routes) ov[key] = p;
      s.topology = Topology(r.routers, std::move(sn), std::move(links), ov);
    } else {
      auto t = build_topology(r.routers, r.nodes_per_router, r.core_bps, r.edge_bps);
      std::vector<ServingNode> sn = t.nodes();
      for (auto& n : sn) n.capacity_bytes = caps[static_cast<std::size_t>(n.id)];
      s.topology = Topology(t.router_count(), std::move(sn), t.links());
    }
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(0, std::string("topology: ") + e.what());
  }

  if (!r.rows.empty()) {
    s.demand = DemandMatrix(nodes, static_cast<std::int32_t>(s.catalog.size()));
    for (NodeId i = 0; i < nodes; ++i) {
      auto it = r.rows.find(i);
      if (it == r.rows.end()) throw ScenarioError(0, "demand: missing row." + std::to_string(i));
      if (it->second.size() != s.catalog.size())
        throw ScenarioError(0, "demand: row." + std::to_string(i) + " has " + std::to_string(it->second.size()) +
                                   " entries, expected " + std::to_string(s.catalog.size()));
      for (std::size_t k = 0; k < s.catalog.size(); ++k) s.demand(i, static_cast<VideoId>(k)) = it->second[k];
    }
    for (const auto& [i, row] : r.rows)
      if (i < 0 || i >= nodes) throw ScenarioError(0, "demand: row." + std::to_string(i) + " does not exist");
  } else {
    try {
      s.demand = generate_demand(static_cast<std::int32_t>(s.catalog.size()), nodes, r.zipf, r.population, r.seeds.demand);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(0, std::string("demand: ") + e.what());
    }
  }

  s.seeds = r.seeds;
  s.placement = r.placement;
  s.selection = r.selection;
  s.traffic = r.traffic;
  s.background_bps.clear();
  for (const auto& l : s.topology.links()) s.background_bps.push_back(r.background_fraction * l.capacity_bps);

  const auto problems = validate_scenario(s);
  if (!problems.empty()) {
    std::string msg = "scenario invalid:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ScenarioError(0, msg);
  }
  return s;
}

inline Scenario parse_scenario(const std::string& text) { return build_scenario(parse_recipe(text)); }

}  // namespace vcache
