#pragma once

// Discrete-slot simulation of collaborative delivery.
//
// Each slot: expire finished flows, collect arrivals, schedule at round
// boundaries, refresh node views at report boundaries, record metrics.
// A request opens a session that streams the video piece by piece; each
// piece is one flow living `reschedule_period_slots`, after which the next
// piece is requested and scheduled afresh.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "vcache/cost.hpp"
#include "vcache/model.hpp"
#include "vcache/placement.hpp"
#include "vcache/selection.hpp"
#include "vcache/workload.hpp"

namespace vcache {

// Number of pieces of length `piece_duration_slots` needed for a video.
inline std::int32_t piece_count_for(const Video& v, std::int64_t piece_duration_slots, double slot_duration_s) {
  if (piece_duration_slots < 1) throw std::invalid_argument("piece duration must be at least one slot");
  const double slots = v.duration_s() / slot_duration_s;
  const double pieces = slots / static_cast<double>(piece_duration_slots);
  return std::max<std::int32_t>(1, static_cast<std::int32_t>(std::ceil(pieces - 1e-9)));
}

inline Catalog split_long_videos(Catalog catalog, std::int64_t piece_duration_slots, double slot_duration_s = 0.1) {
  for (auto& v : catalog) v.piece_count = piece_count_for(v, piece_duration_slots, slot_duration_s);
  return catalog;
}

// Every piece as a video of its own, with the parent's demand row; piece p
// of video k keeps `parent[id] == k`.
struct PieceExpansion {
  Catalog catalog;
  DemandMatrix demand;
  std::vector<VideoId> parent;
};

inline PieceExpansion expand_pieces(const Catalog& catalog, const DemandMatrix& demand) {
  PieceExpansion out;
  for (const auto& v : catalog)
    for (std::int32_t p = 0; p < v.piece_count; ++p) {
      out.catalog.push_back({static_cast<VideoId>(out.catalog.size()), v.size_bytes / v.piece_count, v.rate_bps, 1});
      out.parent.push_back(v.id);
    }
  out.demand = DemandMatrix(demand.nodes(), static_cast<std::int32_t>(out.catalog.size()));
  for (NodeId i = 0; i < demand.nodes(); ++i)
    for (std::size_t k = 0; k < out.parent.size(); ++k) out.demand(i, static_cast<VideoId>(k)) = demand(i, out.parent[k]);
  return out;
}

struct SlotMetrics {
  std::int64_t slot = 0;
  double max_utilization = 0.0;
  double aggregate_cost = 0.0;
  double throughput_bps = 0.0;
  std::int64_t blocked_count = 0;
  std::int64_t merged_count = 0;
  std::int64_t hit_count = 0;
  std::int64_t collaborative_count = 0;
  // Raw requests entering this slot's round, re-requests included; not
  // part of the CSV.
  std::int64_t scheduled_count = 0;

  friend bool operator==(const SlotMetrics&, const SlotMetrics&) = default;
};

struct MetricsSeries {
  std::vector<SlotMetrics> rows;

  double mean_max_utilization() const { return mean(&SlotMetrics::max_utilization); }
  double mean_aggregate_cost() const { return mean(&SlotMetrics::aggregate_cost); }
  double mean_throughput_bps() const { return mean(&SlotMetrics::throughput_bps); }

  template <class T>
  std::int64_t total(T SlotMetrics::*field) const {
    std::int64_t s = 0;
    for (const auto& r : rows) s += static_cast<std::int64_t>(r.*field);
    return s;
  }

 private:
  double mean(double SlotMetrics::*field) const {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.*field;
    return s / static_cast<double>(rows.size());
  }
};

inline constexpr const char* kMetricsHeader =
    "slot,max_utilization,aggregate_cost,throughput_bps,blocked_count,merged_count,hit_count,collaborative_count";

// Header row preceded by a "# scenario_hash=<hash>" comment when a hash is
// given.
inline void write_metrics_csv(std::ostream& os, const MetricsSeries& m, const std::string& scenario_hash = {}) {
  if (!scenario_hash.empty()) os << "# scenario_hash=" << scenario_hash << '\n';
  os << kMetricsHeader << '\n';
  char buf[256];
  for (const auto& r : m.rows) {
    std::snprintf(buf, sizeof buf, "%lld,%.10g,%.10g,%.10g,%lld,%lld,%lld,%lld\n", static_cast<long long>(r.slot),
                  r.max_utilization, r.aggregate_cost, r.throughput_bps, static_cast<long long>(r.blocked_count),
                  static_cast<long long>(r.merged_count), static_cast<long long>(r.hit_count),
                  static_cast<long long>(r.collaborative_count));
    os << buf;
  }
}

struct Session {
  NodeId node = 0;
  VideoId video = 0;
  std::int32_t piece = 0;
  std::int32_t pieces = 1;
};

// One scheduled request and the legs serving it.
struct ActiveFlow {
  RoundRequest request;
  std::vector<Choice> legs;  // `request` field unused
  std::int64_t birth_slot = 0;
  std::int64_t expiry_slot = 0;
  bool this_round = true;  // counted in ss rather than re
  std::vector<std::size_t> sessions;
};

struct PendingRequest {
  RoundRequest request;
  std::size_t session = 0;
};

struct SimState {
  std::int64_t slot = 0;
  FlowTable truth;
  std::vector<FlowTable> views;
  std::vector<ActiveFlow> flows;
  std::vector<PendingRequest> pending;
  std::vector<Session> sessions;
  std::int64_t rounds = 0;
  std::size_t e2e_probes = 0;
};

// Truth rebuilt from the active flows: bg as configured, flows scheduled in
// the current round in ss, older ones in re.
inline FlowTable recompute_truth(const SimState& s, const Topology& topo) {
  FlowTable ft = s.truth;
  std::fill(ft.ss.begin(), ft.ss.end(), 0.0);
  std::fill(ft.re.begin(), ft.re.end(), 0.0);
  for (const auto& f : s.flows)
    for (const auto& leg : f.legs)
      for (LinkId l : topo.path(leg.source, f.request.node))
        (f.this_round ? ft.ss : ft.re)[static_cast<std::size_t>(l)] += f.request.rate_bps * leg.fraction;
  return ft;
}

struct SimOptions {
  bool record_hits = true;
  // Aggregate cost over all selection traffic (ss + re) instead of ss only.
  bool cost_includes_remaining = true;
};

using SimObserver = std::function<void(const SimState&, const SlotMetrics&)>;

namespace detail {

inline void add_flow_load(FlowTable& ft, const Topology& topo, const ActiveFlow& f, double sign) {
  for (const auto& leg : f.legs)
    for (LinkId l : topo.path(leg.source, f.request.node))
      (f.this_round ? ft.ss : ft.re)[static_cast<std::size_t>(l)] += sign * f.request.rate_bps * leg.fraction;
}

}  // namespace detail

// Runs the scenario's traffic over `placement` with the scenario's selection
// strategy. Collaborative arrivals follow scenario.traffic; local hits are
// drawn as an independent stream at the rate implied by the demand split.
inline MetricsSeries run_simulation(const Scenario& sc, const Placement& placement, const SimOptions& opt = {},
                                    const SimObserver& observer = {}) {
  const auto problems = validate_scenario(sc);
  if (!problems.empty()) throw std::invalid_argument("invalid scenario: " + problems.front());
  const auto& topo = sc.topology;
  const auto& sel = sc.selection;
  const auto& tr = sc.traffic;
  MetricsSeries out;
  if (tr.total_slots == 0) return out;

  const auto holders = placement.holder_table();
  std::vector<std::int32_t> pieces(sc.catalog.size());
  for (std::size_t k = 0; k < sc.catalog.size(); ++k)
    pieces[k] = piece_count_for(sc.catalog[k], sel.reschedule_period_slots, tr.slot_duration_s);

  RequestStream collab, hits;
  const auto split = split_demand(sc.demand, placement);
  if (tr.intensity > 0.0 && split.collaborative > 0.0)
    collab = generate_requests(sc.demand, tr.total_slots, tr.intensity, sc.seeds.requests, &placement,
                               tr.slot_duration_s);
  if (opt.record_hits && tr.intensity > 0.0 && split.local > 0.0) {
    const double hit_intensity =
        split.collaborative > 0.0 ? tr.intensity * split.local / split.collaborative : tr.intensity;
    hits = generate_local_requests(sc.demand, placement, tr.total_slots, hit_intensity,
                                   mix_seed(sc.seeds.requests, 17), tr.slot_duration_s);
  }

  SimState st;
  st.truth = FlowTable(topo, sc.background_bps);
  st.views.assign(static_cast<std::size_t>(topo.node_count()), st.truth);

  std::size_t next_collab = 0, next_hit = 0;
  for (std::int64_t t = 0; t < tr.total_slots; ++t) {
    st.slot = t;
    SlotMetrics m;
    m.slot = t;

    // (1) expiry; sessions with pieces left re-request.
    std::vector<ActiveFlow> alive;
    alive.reserve(st.flows.size());
    for (auto& f : st.flows) {
      if (f.expiry_slot > t) {
        alive.push_back(std::move(f));
        continue;
      }
      detail::add_flow_load(st.truth, topo, f, -1.0);
      for (auto sid : f.sessions) {
        auto& s = st.sessions[sid];
        if (++s.piece < s.pieces) {
          RoundRequest r{s.node, s.video, s.piece, sc.catalog[static_cast<std::size_t>(s.video)].rate_bps, 1};
          st.pending.push_back({r, sid});
        }
      }
    }
    st.flows = std::move(alive);
    for (std::size_t l = 0; l < st.truth.size(); ++l) {
      st.truth.ss[l] = std::max(0.0, st.truth.ss[l]);
      st.truth.re[l] = std::max(0.0, st.truth.re[l]);
    }

    // (2) arrivals.
    for (; next_collab < collab.requests.size() && collab.requests[next_collab].slot == t; ++next_collab) {
      const auto& q = collab.requests[next_collab];
      st.sessions.push_back({q.node, q.video, 0, pieces[static_cast<std::size_t>(q.video)]});
      st.pending.push_back({{q.node, q.video, 0, sc.catalog[static_cast<std::size_t>(q.video)].rate_bps, 1},
                            st.sessions.size() - 1});
      ++m.collaborative_count;
    }
    for (; next_hit < hits.requests.size() && hits.requests[next_hit].slot == t; ++next_hit) ++m.hit_count;

    // (3) scheduling.
    if (t % sel.round_len_slots == 0) {
      for (auto& f : st.flows) f.this_round = false;
      st.truth.roll_round();
      for (auto& v : st.views) v.roll_round();

      std::vector<RoundRequest> raw;
      raw.reserve(st.pending.size());
      for (const auto& p : st.pending) raw.push_back(p.request);
      auto merged = merge_requests(raw);
      m.merged_count = merged.merged;
      m.scheduled_count = static_cast<std::int64_t>(raw.size());
      const auto& reqs = merged.requests;
      std::map<std::tuple<NodeId, VideoId, std::int32_t>, std::size_t> index;
      for (std::size_t q = 0; q < reqs.size(); ++q) index[{reqs[q].node, reqs[q].video, reqs[q].piece}] = q;
      std::vector<std::vector<std::size_t>> attached(reqs.size());
      for (const auto& p : st.pending)
        attached[index.at({p.request.node, p.request.video, p.request.piece})].push_back(p.session);
      st.pending.clear();

      RoundAssignment all;
      auto collect = [&](const RoundAssignment& a, std::size_t offset) {
        for (auto c : a.choices) {
          c.request += offset;
          all.choices.push_back(c);
        }
        for (auto q : a.blocked) all.blocked.push_back(q + offset);
      };
      std::mt19937_64 rng(mix_seed(sc.seeds.selection, static_cast<std::uint64_t>(st.rounds)));
      std::optional<LatencySnapshot> snapshot;
      if (sel.strategy == SelectionStrategy::e2e) snapshot.emplace(topo, st.truth, sel.gamma);

      if (sel.strategy == SelectionStrategy::te || sel.strategy == SelectionStrategy::centralized) {
        if (sel.strategy == SelectionStrategy::centralized) {
          try {
            BarrierOptions bo;
            bo.epsilon = sel.epsilon;
            bo.gamma = sel.gamma;
            collect(centralized_mrcp(topo, reqs, holders, st.truth, bo).assignment, 0);
          } catch (const NoStrictlyFeasiblePoint&) {
            collect(te_select(topo, reqs, holders, st.truth).assignment, 0);
          }
        } else {
          collect(te_select(topo, reqs, holders, st.truth).assignment, 0);
        }
      } else {
        // requests are sorted by node, so each node's batch is contiguous
        std::size_t b = 0;
        while (b < reqs.size()) {
          std::size_t e = b;
          while (e < reqs.size() && reqs[e].node == reqs[b].node) ++e;
          const std::span<const RoundRequest> batch(reqs.data() + b, e - b);
          const auto node = static_cast<std::size_t>(reqs[b].node);
          if (sel.strategy == SelectionStrategy::linkshare) {
            collect(linkshare_round(st.views[node], topo, batch, holders, sel.delta, sel.gamma), b);
          } else {
            collect(reference_select(sel.strategy, topo, batch, holders, &rng, snapshot ? &*snapshot : nullptr), b);
          }
          b = e;
        }
      }
      if (snapshot) st.e2e_probes += snapshot->probes();

      std::vector<ActiveFlow> fresh(reqs.size());
      std::vector<bool> used(reqs.size(), false);
      for (const auto& c : all.choices) {
        auto& f = fresh[c.request];
        f.legs.push_back(c);
        used[c.request] = true;
      }
      for (std::size_t q = 0; q < reqs.size(); ++q) {
        if (!used[q]) continue;
        auto& f = fresh[q];
        f.request = reqs[q];
        f.birth_slot = t;
        f.expiry_slot = t + sel.reschedule_period_slots;
        f.this_round = true;
        f.sessions = std::move(attached[q]);
        detail::add_flow_load(st.truth, topo, f, 1.0);
        st.flows.push_back(std::move(f));
      }
      for (auto q : all.blocked) m.blocked_count += reqs[q].multiplicity;
      ++st.rounds;
    }

    // (4) link-state report.
    if (t % sel.report_period_slots == 0)
      for (auto& v : st.views) v = st.truth;

    // (5) metrics on ground truth.
    m.max_utilization = st.truth.max_utilization();
    m.aggregate_cost = aggregate_cost(st.truth, sel.gamma, opt.cost_includes_remaining);
    for (const auto& f : st.flows)
      for (const auto& leg : f.legs) m.throughput_bps += f.request.rate_bps * leg.fraction;
    out.rows.push_back(m);
    if (observer) observer(st, m);
  }
  return out;
}

struct StaticResult {
  double aggregate_cost = 0.0;
  std::size_t requests = 0;  // after merging
  std::int64_t merged = 0;
  std::size_t blocked = 0;
  FlowTable truth;
};

// One slot, one scheduling pass, links pre-loaded with `background` (the
// scenario's background load when empty). Returns g = sum_l f_l^ss zeta(f_l).
inline StaticResult static_scenario(const Scenario& sc, const Placement& placement, double intensity,
                                    SelectionStrategy strategy, std::uint64_t seed,
                                    const std::vector<double>& background = {}) {
  const auto& topo = sc.topology;
  const auto holders = placement.holder_table();
  StaticResult out;
  out.truth = FlowTable(topo, background.empty() ? sc.background_bps : background);

  const auto stream = generate_requests(sc.demand, 1, intensity, seed, &placement, sc.traffic.slot_duration_s);
  std::vector<RoundRequest> raw;
  for (const auto& q : stream.requests)
    raw.push_back({q.node, q.video, 0, sc.catalog[static_cast<std::size_t>(q.video)].rate_bps, 1});
  const auto merged = merge_requests(raw);
  out.merged = merged.merged;
  out.requests = merged.requests.size();
  const auto& reqs = merged.requests;
  if (reqs.empty()) return out;

  const auto& sel = sc.selection;
  const FlowTable initial = out.truth;
  if (strategy == SelectionStrategy::te) {
    apply_assignment(out.truth, topo, reqs, te_select(topo, reqs, holders, initial).assignment);
  } else if (strategy == SelectionStrategy::centralized) {
    BarrierOptions bo;
    bo.epsilon = sel.epsilon;
    bo.gamma = sel.gamma;
    try {
      apply_assignment(out.truth, topo, reqs, centralized_mrcp(topo, reqs, holders, initial, bo).assignment);
    } catch (const NoStrictlyFeasiblePoint&) {
      apply_assignment(out.truth, topo, reqs, te_select(topo, reqs, holders, initial).assignment);
    }
  } else {
    std::mt19937_64 rng(mix_seed(seed, 99));
    LatencySnapshot snapshot(topo, initial, sel.gamma);
    std::size_t b = 0;
    while (b < reqs.size()) {
      std::size_t e = b;
      while (e < reqs.size() && reqs[e].node == reqs[b].node) ++e;
      const std::span<const RoundRequest> batch(reqs.data() + b, e - b);
      RoundAssignment a;
      if (strategy == SelectionStrategy::linkshare) {
        FlowTable view = initial;
        a = linkshare_round(view, topo, batch, holders, sel.delta, sel.gamma);
      } else {
        a = reference_select(strategy, topo, batch, holders, &rng, &snapshot);
      }
      out.blocked += a.blocked.size();
      apply_assignment(out.truth, topo, batch, a);
      b = e;
    }
  }
  out.aggregate_cost = aggregate_cost(out.truth, sel.gamma, false);
  return out;
}

}  // namespace vcache
