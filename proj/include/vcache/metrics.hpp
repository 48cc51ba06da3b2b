#pragma once

// Control-overhead accounting, traffic savings and the per-run summary.

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "vcache/model.hpp"
#include "vcache/placement.hpp"
#include "vcache/sim.hpp"

namespace vcache {

struct Overhead {
  double bytes = 0.0;  // per reporting cycle (LinkShare) or per slot (E2E)
  double bps = 0.0;
};

// Link-state reporting: every report is multicast over a tree spanning the
// network, `tree_hops` transmissions per report (the link count when
// negative), and there is one report per link.
inline Overhead linkshare_overhead(const Topology& topo, double packet_bytes = 32.0, std::int64_t period_slots = 2,
                                   double slot_duration_s = 0.1, std::int64_t tree_hops = -1) {
  if (!(packet_bytes > 0.0) || period_slots < 1 || !(slot_duration_s > 0.0))
    throw std::invalid_argument("overhead parameters must be positive");
  const auto links = static_cast<double>(topo.link_count());
  const double hops = tree_hops < 0 ? links : static_cast<double>(tree_hops);
  Overhead o;
  o.bytes = links * hops * packet_bytes;
  o.bps = o.bytes * 8.0 / (static_cast<double>(period_slots) * slot_duration_s);
  return o;
}

// End-to-end probing: every ordered node pair is probed once per slot, each
// probe travelling `roundtrip_hops` links.
inline Overhead e2e_overhead(std::int64_t node_count, double roundtrip_hops, double packet_bytes = 32.0,
                             double slot_duration_s = 0.1) {
  if (node_count < 2) throw std::invalid_argument("probing needs at least two nodes");
  if (!(packet_bytes > 0.0) || !(slot_duration_s > 0.0)) throw std::invalid_argument("overhead parameters must be positive");
  const auto probes = static_cast<double>(node_count * (node_count - 1));
  Overhead o;
  o.bytes = probes * roundtrip_hops * packet_bytes;
  o.bps = o.bytes * 8.0 / slot_duration_s;
  return o;
}

// Mean round-trip hop count over ordered pairs of distinct nodes.
inline double mean_roundtrip_hops(const Topology& topo) {
  double sum = 0.0;
  std::int64_t pairs = 0;
  for (NodeId j = 0; j < topo.node_count(); ++j)
    for (NodeId i = 0; i < topo.node_count(); ++i) {
      if (i == j) continue;
      sum += path_cost_hops(topo, j, i) + path_cost_hops(topo, i, j);
      ++pairs;
    }
  return pairs ? sum / static_cast<double>(pairs) : 0.0;
}

struct Savings {
  double hit_saving = 0.0;  // size-weighted demand served locally
  double collaborative_fraction = 0.0;
  double merge_saving = 0.0;  // merged requests over collaborative requests scheduled
};

// Merge volume is counted per scheduled piece request; every piece flow
// lasts one reschedule period at r_k, so with a common rate counts and
// volumes give the same fraction.
inline Savings savings_report(const PlacementProblem& prob, const Placement& placement, const MetricsSeries& series) {
  Savings s;
  s.hit_saving = hit_ratio(placement, prob);
  s.collaborative_fraction = 1.0 - s.hit_saving;
  const auto merged = series.total(&SlotMetrics::merged_count);
  const auto scheduled = series.total(&SlotMetrics::scheduled_count);
  s.merge_saving = scheduled > 0 ? static_cast<double>(merged) / static_cast<double>(scheduled) : 0.0;
  return s;
}

inline const char* to_string(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::linkshare: return "linkshare";
    case SelectionStrategy::e2e: return "e2e";
    case SelectionStrategy::nearest: return "nearest";
    case SelectionStrategy::random: return "random";
    case SelectionStrategy::te: return "te";
    case SelectionStrategy::centralized: return "centralized";
  }
  return "?";
}

inline nlohmann::json run_summary(const std::string& scenario_hash, SelectionStrategy strategy, const MetricsSeries& m) {
  nlohmann::json j;
  j["scenario_hash"] = scenario_hash;
  j["strategy"] = to_string(strategy);
  j["slots"] = m.rows.size();
  j["mean_max_utilization"] = m.mean_max_utilization();
  j["mean_aggregate_cost"] = m.mean_aggregate_cost();
  j["mean_throughput_bps"] = m.mean_throughput_bps();
  j["blocked"] = m.total(&SlotMetrics::blocked_count);
  j["merged"] = m.total(&SlotMetrics::merged_count);
  j["hits"] = m.total(&SlotMetrics::hit_count);
  j["collaborative"] = m.total(&SlotMetrics::collaborative_count);
  return j;
}

}  // namespace vcache
