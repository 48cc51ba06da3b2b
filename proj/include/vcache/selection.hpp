#pragma once

// Per-round source selection. Every collaborative request (node i, video k)
// must be served from some j in T_k, the set of nodes caching k; the choice
// loads every link on P(j, i) with the video rate.
//
// LinkShare runs independently at each node on that node's copy of the link
// table. The reference strategies pick by uniform draw, by hop count, or by
// measured path latency. te_select solves the min-max utilization LP and
// centralized_mrcp minimizes the aggregate cost with a log-barrier method.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "vcache/cost.hpp"
#include "vcache/lp.hpp"
#include "vcache/model.hpp"

namespace vcache {

// One scheduled flow request after merging. `piece` distinguishes pieces of
// a split video; `multiplicity` counts the raw requests folded into it.
struct RoundRequest {
  NodeId node = 0;
  VideoId video = 0;
  std::int32_t piece = 0;
  double rate_bps = 0.0;
  std::int32_t multiplicity = 1;

  friend bool operator==(const RoundRequest&, const RoundRequest&) = default;
};

struct MergeResult {
  std::vector<RoundRequest> requests;  // sorted by (node, video, piece)
  std::int64_t merged = 0;             // raw requests absorbed into another
};

// Collapses duplicate (node, video, piece) requests into one flow at rate
// r_k carrying the summed multiplicity.
inline MergeResult merge_requests(const std::vector<RoundRequest>& raw) {
  std::map<std::tuple<NodeId, VideoId, std::int32_t>, RoundRequest> groups;
  MergeResult out;
  for (const auto& r : raw) {
    auto [it, fresh] = groups.try_emplace({r.node, r.video, r.piece}, r);
    if (!fresh) {
      it->second.multiplicity += r.multiplicity;
      out.merged += r.multiplicity;
    } else {
      out.merged += r.multiplicity - 1;
    }
  }
  for (auto& [key, r] : groups) out.requests.push_back(r);
  return out;
}

struct Choice {
  std::size_t request = 0;
  NodeId source = 0;
  double fraction = 1.0;

  friend bool operator==(const Choice&, const Choice&) = default;
};

// x_ji^k for one batch of requests; `request` indexes the batch the
// assignment was computed for.
struct RoundAssignment {
  std::vector<Choice> choices;
  std::vector<std::size_t> blocked;

  friend bool operator==(const RoundAssignment&, const RoundAssignment&) = default;
};

using HolderTable = std::vector<std::vector<NodeId>>;

namespace detail {

inline const std::vector<NodeId>& sources_for(const HolderTable& holders, const RoundRequest& r) {
  const auto& t = holders.at(static_cast<std::size_t>(r.video));
  if (t.empty()) throw std::logic_error("video " + std::to_string(r.video) + " has no copy in the network");
  return t;
}

}  // namespace detail

// LinkShare at one node. Requests are handled in increasing |T_k|, then
// video id, then piece; each goes to the source with the least tentative
// path cost in `view`, and `view` is charged with r_k along that path before
// the next request. With delta > 0 a source whose path has a link that would
// exceed (1 - delta) C_l is skipped; a request with no usable source is
// blocked.
inline RoundAssignment linkshare_round(FlowTable& view, const Topology& topo, std::span<const RoundRequest> requests,
                                       const HolderTable& holders, double delta = 0.0, double gamma = 0.99) {
  std::vector<std::size_t> order(requests.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = requests[a];
    const auto& rb = requests[b];
    const auto ta = holders.at(static_cast<std::size_t>(ra.video)).size();
    const auto tb = holders.at(static_cast<std::size_t>(rb.video)).size();
    return std::tie(ta, ra.video, ra.piece) < std::tie(tb, rb.video, rb.piece);
  });

  RoundAssignment out;
  for (std::size_t q : order) {
    const auto& r = requests[q];
    NodeId best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (NodeId j : detail::sources_for(holders, r)) {
      const auto& p = topo.path(j, r.node);
      if (delta > 0.0) {
        bool over = false;
        for (LinkId l : p)
          if (view.total(l) + r.rate_bps > (1.0 - delta) * view.capacity[static_cast<std::size_t>(l)]) {
            over = true;
            break;
          }
        if (over) continue;
      }
      const double c = path_marginal_cost(view, p, r.rate_bps, gamma);
      if (c < best_cost) {
        best_cost = c;
        best = j;
      }
    }
    if (best < 0) {
      out.blocked.push_back(q);
      continue;
    }
    view.add(topo.path(best, r.node), r.rate_bps);
    out.choices.push_back({q, best, 1.0});
  }
  std::sort(out.choices.begin(), out.choices.end(), [](const Choice& a, const Choice& b) { return a.request < b.request; });
  return out;
}

// Path latencies frozen at the first probe of each (source, destination)
// pair within a round; the table is the link state at round start.
class LatencySnapshot {
 public:
  LatencySnapshot(const Topology& topo, FlowTable state, double gamma = 0.99)
      : topo_(&topo), state_(std::move(state)), gamma_(gamma),
        cache_(static_cast<std::size_t>(topo.node_count()) * static_cast<std::size_t>(topo.node_count()),
               std::numeric_limits<double>::quiet_NaN()) {}

  double measure(NodeId j, NodeId i) {
    auto& v = cache_[static_cast<std::size_t>(j) * static_cast<std::size_t>(topo_->node_count()) +
                     static_cast<std::size_t>(i)];
    if (std::isnan(v)) {
      v = path_latency(state_, topo_->path(j, i), gamma_);
      ++probes_;
    }
    return v;
  }

  std::size_t probes() const { return probes_; }

 private:
  const Topology* topo_;
  FlowTable state_;
  double gamma_;
  std::vector<double> cache_;
  std::size_t probes_ = 0;
};

// Random, nearest-source and end-to-end selection. `snapshot` is required
// for e2e only; `rng` for random only. Ties go to the lower node id.
inline RoundAssignment reference_select(SelectionStrategy strategy, const Topology& topo,
                                        std::span<const RoundRequest> requests, const HolderTable& holders,
                                        std::mt19937_64* rng = nullptr, LatencySnapshot* snapshot = nullptr) {
  if (strategy == SelectionStrategy::random && !rng) throw std::invalid_argument("random selection needs an rng");
  if (strategy == SelectionStrategy::e2e && !snapshot) throw std::invalid_argument("e2e selection needs a snapshot");
  if (strategy != SelectionStrategy::random && strategy != SelectionStrategy::nearest &&
      strategy != SelectionStrategy::e2e)
    throw std::invalid_argument("not a reference strategy");

  RoundAssignment out;
  for (std::size_t q = 0; q < requests.size(); ++q) {
    const auto& r = requests[q];
    const auto& t = detail::sources_for(holders, r);
    NodeId pick = t.front();
    if (strategy == SelectionStrategy::random) {
      std::uniform_int_distribution<std::size_t> u(0, t.size() - 1);
      pick = t[u(*rng)];
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (NodeId j : t) {
        const double d = strategy == SelectionStrategy::nearest ? static_cast<double>(path_cost_hops(topo, j, r.node))
                                                                : snapshot->measure(j, r.node);
        if (d < best) {
          best = d;
          pick = j;
        }
      }
    }
    out.choices.push_back({q, pick, 1.0});
  }
  return out;
}

// Loads assignment `a` over `requests` onto the ss component of `ft`.
inline void apply_assignment(FlowTable& ft, const Topology& topo, std::span<const RoundRequest> requests,
                             const RoundAssignment& a) {
  for (const auto& c : a.choices) {
    const auto& r = requests[c.request];
    ft.add(topo.path(c.source, r.node), r.rate_bps * c.fraction);
  }
}

struct TeResult {
  RoundAssignment assignment;
  double pi = 0.0;  // min-max utilization
  bool strictly_feasible = false;  // pi < 1
};

// min pi s.t. (current load + scheduled load)_l <= pi C_l, sum_j x_ji^k = 1.
// Requests with one source are fixed and only shift the base load.
inline TeResult te_select(const Topology& topo, std::span<const RoundRequest> requests, const HolderTable& holders,
                          const FlowTable& ft, const lp::Options& opt = {}) {
  const auto nl = ft.size();
  std::vector<double> base(nl);
  for (std::size_t l = 0; l < nl; ++l) base[l] = ft.total(static_cast<LinkId>(l));

  TeResult out;
  struct Var {
    std::size_t request;
    NodeId source;
  };
  std::vector<Var> vars;
  std::vector<std::pair<std::size_t, std::size_t>> groups;  // [begin, end) in vars
  for (std::size_t q = 0; q < requests.size(); ++q) {
    const auto& r = requests[q];
    const auto& t = detail::sources_for(holders, r);
    if (t.size() == 1) {
      for (LinkId l : topo.path(t[0], r.node)) base[static_cast<std::size_t>(l)] += r.rate_bps;
      out.assignment.choices.push_back({q, t[0], 1.0});
      continue;
    }
    const auto begin = vars.size();
    for (NodeId j : t) vars.push_back({q, j});
    groups.emplace_back(begin, vars.size());
  }

  double floor_pi = 0.0;
  for (std::size_t l = 0; l < nl; ++l) floor_pi = std::max(floor_pi, base[l] / ft.capacity[l]);
  if (vars.empty()) {
    out.pi = floor_pi;
    out.strictly_feasible = out.pi < 1.0;
    std::sort(out.assignment.choices.begin(), out.assignment.choices.end(),
              [](const Choice& a, const Choice& b) { return a.request < b.request; });
    return out;
  }
  if (vars.size() + 1 > lp::kMaxVariables) throw std::length_error("TE LP exceeds the dense solver limit");

  // Variables: x_v for each candidate, then pi. Utilization rows are written
  // in units of capacity so coefficients are r/C.
  const std::size_t pi_var = vars.size();
  lp::Problem prob(vars.size() + 1);
  prob.set_objective(pi_var, -1.0);
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(nl);
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const auto& r = requests[vars[v].request];
    for (LinkId l : topo.path(vars[v].source, r.node)) {
      const auto li = static_cast<std::size_t>(l);
      rows[li].emplace_back(v, r.rate_bps / ft.capacity[li]);
    }
  }
  for (std::size_t l = 0; l < nl; ++l) {
    if (rows[l].empty()) continue;
    auto row = rows[l];
    row.emplace_back(pi_var, -1.0);
    prob.add_le(row, -base[l] / ft.capacity[l]);
  }
  prob.add_ge({{pi_var, 1.0}}, floor_pi);
  for (const auto& [b, e] : groups) {
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t v = b; v < e; ++v) row.emplace_back(v, 1.0);
    prob.add_eq(row, 1.0);
  }
  const auto res = lp::solve(prob, opt);
  if (res.status != lp::Status::optimal) throw std::runtime_error("TE LP did not reach optimality");
  out.pi = res.x[pi_var];
  out.strictly_feasible = out.pi < 1.0;
  for (const auto& [b, e] : groups) {
    double sum = 0.0;
    for (std::size_t v = b; v < e; ++v) sum += std::max(0.0, res.x[v]);
    for (std::size_t v = b; v < e; ++v) {
      const double x = std::max(0.0, res.x[v]) / sum;
      if (x > 0.0) out.assignment.choices.push_back({vars[v].request, vars[v].source, x});
    }
  }
  std::stable_sort(out.assignment.choices.begin(), out.assignment.choices.end(),
                   [](const Choice& a, const Choice& b) { return a.request < b.request; });
  return out;
}

// Euclidean projection of v onto the probability simplex.
inline void project_to_simplex(std::span<double> v) {
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  for (auto& x : v) x = std::max(0.0, x - theta);
}

struct NoStrictlyFeasiblePoint : std::runtime_error {
  explicit NoStrictlyFeasiblePoint(double pi)
      : std::runtime_error("no strictly feasible source assignment (min-max utilization " + std::to_string(pi) + ")"),
        pi(pi) {}
  double pi;
};

struct BarrierOptions {
  double epsilon = 1e-6;  // stop once |L| / m <= epsilon
  double m0 = 1.0;
  double mu = 10.0;
  double gamma = 0.99;
  double armijo_sigma = 1e-4;
  double armijo_beta = 0.5;
  double inner_gap = 1e-3;  // Frank-Wolfe gap of the barrier objective, relative to |L|
  std::size_t max_inner = 20000;
};

struct CentralizedResult {
  RoundAssignment assignment;
  double objective = 0.0;  // g at the returned point
  double certified_gap = 0.0;  // upper bound on g - min g
  double final_m = 0.0;
  std::size_t inner_iterations = 0;
};

// Barrier method for the aggregate-cost problem: from the TE point, minimize
// m g(x) + phi(x) with phi = -sum_l log(C_l - f_l) over the product of
// per-request simplices by projected gradient (Barzilai-Borwein trial step,
// Armijo backtracking), then m <- mu m, until |L| / m <= epsilon.
inline CentralizedResult centralized_mrcp(const Topology& topo, std::span<const RoundRequest> requests,
                                          const HolderTable& holders, const FlowTable& ft,
                                          const BarrierOptions& opt = {}) {
  const auto te = te_select(topo, requests, holders, ft);
  if (!te.strictly_feasible) throw NoStrictlyFeasiblePoint(te.pi);

  const auto nl = ft.size();
  struct Var {
    std::size_t request;
    NodeId source;
    double rate;
    const Path* path;
  };
  std::vector<Var> vars;
  std::vector<std::size_t> group_begin;
  for (std::size_t q = 0; q < requests.size(); ++q) {
    group_begin.push_back(vars.size());
    const auto& r = requests[q];
    for (NodeId j : detail::sources_for(holders, r)) vars.push_back({q, j, r.rate_bps, &topo.path(j, r.node)});
  }
  group_begin.push_back(vars.size());

  std::vector<double> x(vars.size(), 0.0);
  for (const auto& c : te.assignment.choices)
    for (std::size_t v = group_begin[c.request]; v < group_begin[c.request + 1]; ++v)
      if (vars[v].source == c.source) x[v] += c.fraction;

  std::vector<bool> touched(nl, false);
  for (const auto& v : vars)
    for (LinkId l : *v.path) touched[static_cast<std::size_t>(l)] = true;

  const double links = static_cast<double>(nl);
  std::vector<double> ss(nl), f(nl);
  auto loads = [&](const std::vector<double>& y) {
    for (std::size_t l = 0; l < nl; ++l) ss[l] = ft.ss[l];
    for (std::size_t v = 0; v < vars.size(); ++v)
      if (y[v] != 0.0)
        for (LinkId l : *vars[v].path) ss[static_cast<std::size_t>(l)] += vars[v].rate * y[v];
    for (std::size_t l = 0; l < nl; ++l) f[l] = ss[l] + ft.bg[l] + ft.re[l];
  };
  auto g_value = [&]() {
    double g = 0.0;
    for (std::size_t l = 0; l < nl; ++l)
      if (ss[l] != 0.0) g += ss[l] * link_cost(f[l], ft.capacity[l], opt.gamma);
    return g;
  };
  auto barrier_value = [&](double m, const std::vector<double>& y) {
    loads(y);
    double phi = 0.0;
    for (std::size_t l = 0; l < nl; ++l) {
      if (!touched[l]) continue;
      const double slack = ft.capacity[l] - f[l];
      if (!(slack > 0.0)) return std::numeric_limits<double>::infinity();
      phi -= std::log(slack);
    }
    return m * g_value() + phi;
  };
  // Per-link derivative weights; with_barrier=false gives grad g alone.
  std::vector<double> w(nl);
  auto gradient = [&](double m, const std::vector<double>& y, std::vector<double>& grad, bool with_barrier) {
    loads(y);
    for (std::size_t l = 0; l < nl; ++l) {
      if (!touched[l]) continue;
      w[l] = m * (link_cost(f[l], ft.capacity[l], opt.gamma) +
                  ss[l] * link_cost_derivative(f[l], ft.capacity[l], opt.gamma));
      if (with_barrier) w[l] += 1.0 / (ft.capacity[l] - f[l]);
    }
    grad.assign(vars.size(), 0.0);
    for (std::size_t v = 0; v < vars.size(); ++v) {
      double s = 0.0;
      for (LinkId l : *vars[v].path) s += w[static_cast<std::size_t>(l)];
      grad[v] = vars[v].rate * s;
    }
  };
  // max over simplex vertices s of grad . (y - s).
  auto fw_gap = [&](const std::vector<double>& y, const std::vector<double>& grad) {
    double gap = 0.0;
    for (std::size_t q = 0; q + 1 < group_begin.size(); ++q) {
      double lo = std::numeric_limits<double>::infinity(), dot = 0.0;
      for (std::size_t v = group_begin[q]; v < group_begin[q + 1]; ++v) {
        lo = std::min(lo, grad[v]);
        dot += grad[v] * y[v];
      }
      if (group_begin[q + 1] > group_begin[q]) gap += dot - lo;
    }
    return gap;
  };
  auto project = [&](std::vector<double>& y) {
    for (std::size_t q = 0; q + 1 < group_begin.size(); ++q)
      project_to_simplex(std::span<double>(y.data() + group_begin[q], group_begin[q + 1] - group_begin[q]));
  };

  CentralizedResult out;
  double m = opt.m0;
  std::vector<double> grad, prev_x, prev_grad, trial(vars.size());
  for (;;) {
    double step = 0.0;
    double value = barrier_value(m, x);
    gradient(m, x, grad, true);
    prev_x.clear();
    for (std::size_t it = 0; it < opt.max_inner; ++it) {
      if (fw_gap(x, grad) <= opt.inner_gap * links) break;
      if (!prev_x.empty()) {
        double sy = 0.0, ss_ = 0.0;
        for (std::size_t v = 0; v < x.size(); ++v) {
          const double dx = x[v] - prev_x[v], dg = grad[v] - prev_grad[v];
          sy += dx * dg;
          ss_ += dx * dx;
        }
        if (sy > 0.0) step = ss_ / sy;
      }
      if (!(step > 0.0)) {
        double gmax = 0.0;
        for (double gv : grad) gmax = std::max(gmax, std::fabs(gv));
        step = gmax > 0.0 ? 1.0 / gmax : 1.0;
      }
      bool moved = false;
      for (int bt = 0; bt < 200; ++bt) {
        for (std::size_t v = 0; v < x.size(); ++v) trial[v] = x[v] - step * grad[v];
        project(trial);
        double decrease = 0.0;
        for (std::size_t v = 0; v < x.size(); ++v) decrease += grad[v] * (trial[v] - x[v]);
        const double tv = barrier_value(m, trial);
        if (tv <= value + opt.armijo_sigma * decrease) {
          moved = trial != x;
          value = tv;
          break;
        }
        step *= opt.armijo_beta;
      }
      ++out.inner_iterations;
      if (!moved) break;
      prev_x = x;
      prev_grad = grad;
      x = trial;
      gradient(m, x, grad, true);
    }
    if (links / m <= opt.epsilon) break;
    m *= opt.mu;
  }

  out.final_m = m;
  loads(x);
  out.objective = g_value();
  gradient(1.0, x, grad, false);
  out.certified_gap = fw_gap(x, grad);
  for (std::size_t v = 0; v < vars.size(); ++v)
    if (x[v] > 0.0) out.assignment.choices.push_back({vars[v].request, vars[v].source, x[v]});
  return out;
}

// Fractions sum to one per non-blocked request, within `tol`.
inline bool assignment_complete(const RoundAssignment& a, std::size_t request_count, double tol = 1e-9) {
  std::vector<double> sum(request_count, 0.0);
  for (const auto& c : a.choices) {
    if (c.request >= request_count || c.fraction < -tol) return false;
    sum[c.request] += c.fraction;
  }
  std::vector<bool> blocked(request_count, false);
  for (auto q : a.blocked) blocked.at(q) = true;
  for (std::size_t q = 0; q < request_count; ++q)
    if (blocked[q] ? sum[q] != 0.0 : std::fabs(sum[q] - 1.0) > tol) return false;
  return true;
}

// Audit lines "round node video source fraction"; blocked requests carry
// source -1 and fraction 0.
inline void write_assignment(std::ostream& os, std::int64_t round, std::span<const RoundRequest> requests,
                             const RoundAssignment& a) {
  char buf[128];
  for (const auto& c : a.choices) {
    const auto& r = requests[c.request];
    std::snprintf(buf, sizeof buf, "%lld %d %d %d %.17g\n", static_cast<long long>(round), r.node, r.video, c.source,
                  c.fraction);
    os << buf;
  }
  for (auto q : a.blocked) {
    const auto& r = requests[q];
    std::snprintf(buf, sizeof buf, "%lld %d %d -1 0\n", static_cast<long long>(round), r.node, r.video);
    os << buf;
  }
}

}  // namespace vcache
