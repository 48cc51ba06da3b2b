#pragma once

// Content placement: choose the set of videos each serving node caches so
// that every video has at least one copy in the network and the
// size-weighted local hit volume sum_i sum_k s_k lambda_i^k y_i^k is as large
// as possible.
//
// The heuristic splits storage in two: a fraction alpha of the total capacity
// goes to the locally most popular videos (reservation packing), the rest
// must hold one copy of everything not yet cached (one-copy assignment), and
// whatever space is left is filled per node by a density-ordered knapsack
// pass. SRS searches alpha by bisection; IRS reserves alpha per node instead
// of system-wide and scans alpha on a grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vcache/lp.hpp"
#include "vcache/model.hpp"

namespace vcache {

// Per-node cached sets, stored as a dense indicator matrix y_i^k.
class Placement {
 public:
  Placement() = default;
  Placement(std::int32_t nodes, std::int32_t videos)
      : nodes_(nodes), videos_(videos),
        y_(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(videos), 0) {}

  std::int32_t nodes() const { return nodes_; }
  std::int32_t videos() const { return videos_; }

  bool contains(NodeId i, VideoId k) const { return y_[index(i, k)] != 0; }
  void add(NodeId i, VideoId k) { y_[index(i, k)] = 1; }

  std::vector<VideoId> videos_at(NodeId i) const {
    std::vector<VideoId> out;
    for (VideoId k = 0; k < videos_; ++k)
      if (contains(i, k)) out.push_back(k);
    return out;
  }

  // T_k, in increasing node id.
  std::vector<NodeId> holders(VideoId k) const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < nodes_; ++i)
      if (contains(i, k)) out.push_back(i);
    return out;
  }

  std::vector<std::vector<NodeId>> holder_table() const {
    std::vector<std::vector<NodeId>> t(static_cast<std::size_t>(videos_));
    for (NodeId i = 0; i < nodes_; ++i)
      for (VideoId k = 0; k < videos_; ++k)
        if (contains(i, k)) t[static_cast<std::size_t>(k)].push_back(i);
    return t;
  }

  double used_bytes(NodeId i, const std::vector<double>& sizes) const {
    double s = 0.0;
    for (VideoId k = 0; k < videos_; ++k)
      if (contains(i, k)) s += sizes[static_cast<std::size_t>(k)];
    return s;
  }

  // Every video has at least one copy.
  bool covering() const {
    for (VideoId k = 0; k < videos_; ++k) {
      bool any = false;
      for (NodeId i = 0; i < nodes_ && !any; ++i) any = contains(i, k);
      if (!any) return false;
    }
    return true;
  }

  std::size_t copies() const { return static_cast<std::size_t>(std::count(y_.begin(), y_.end(), 1)); }

  friend bool operator==(const Placement&, const Placement&) = default;

 private:
  std::size_t index(NodeId i, VideoId k) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(videos_) + static_cast<std::size_t>(k);
  }

  std::int32_t nodes_ = 0;
  std::int32_t videos_ = 0;
  std::vector<std::uint8_t> y_;
};

// Inputs of the placement problem: lambda, video sizes s_k, capacities D_i.
struct PlacementProblem {
  DemandMatrix demand;
  std::vector<double> sizes;
  std::vector<double> capacities;

  PlacementProblem() = default;
  PlacementProblem(DemandMatrix d, std::vector<double> s, std::vector<double> c)
      : demand(std::move(d)), sizes(std::move(s)), capacities(std::move(c)) {
    if (demand.nodes() != static_cast<std::int32_t>(capacities.size()) ||
        demand.videos() != static_cast<std::int32_t>(sizes.size()))
      throw std::invalid_argument("placement problem dimensions disagree");
  }

  static PlacementProblem from(const Scenario& s) { return {s.demand, s.sizes(), s.capacities()}; }

  std::int32_t nodes() const { return demand.nodes(); }
  std::int32_t videos() const { return demand.videos(); }
  double weight(NodeId i, VideoId k) const { return sizes[static_cast<std::size_t>(k)] * demand(i, k); }
  double total_capacity() const { return std::accumulate(capacities.begin(), capacities.end(), 0.0); }
  double total_size() const { return std::accumulate(sizes.begin(), sizes.end(), 0.0); }
};

// H = sum over cached pairs of s_k * lambda_i^k.
inline double placement_objective(const Placement& p, const PlacementProblem& prob) {
  double h = 0.0;
  for (NodeId i = 0; i < prob.nodes(); ++i)
    for (VideoId k = 0; k < prob.videos(); ++k)
      if (p.contains(i, k)) h += prob.weight(i, k);
  return h;
}

inline double total_weight(const PlacementProblem& prob) {
  double h = 0.0;
  for (NodeId i = 0; i < prob.nodes(); ++i)
    for (VideoId k = 0; k < prob.videos(); ++k) h += prob.weight(i, k);
  return h;
}

// Size-weighted fraction of demand served from the local cache.
inline double hit_ratio(const Placement& p, const PlacementProblem& prob) {
  const double total = total_weight(prob);
  if (!(total > 0.0)) throw std::invalid_argument("hit ratio undefined for zero total demand");
  return placement_objective(p, prob) / total;
}

// True when no node exceeds its capacity.
inline bool respects_capacity(const Placement& p, const PlacementProblem& prob) {
  for (NodeId i = 0; i < prob.nodes(); ++i)
    if (p.used_bytes(i, prob.sizes) > prob.capacities[static_cast<std::size_t>(i)]) return false;
  return true;
}

struct ReservationResult {
  Placement placement;
  std::vector<double> residual;  // D'_i
  std::vector<VideoId> covered;  // N_0, sorted
};

struct PlacementResult {
  Placement placement;
  double objective = 0.0;
  double alpha = 0.0;
  bool feasible = false;
  // |N_r|: videos left uncovered after the reservation step.
  std::size_t uncovered_after_reservation = 0;
  // srs only: the largest alpha the bisection found feasible.
  double frontier_alpha = 0.0;
};

namespace detail {

inline std::vector<VideoId> covered_set(const Placement& p) {
  std::vector<VideoId> out;
  for (VideoId k = 0; k < p.videos(); ++k)
    for (NodeId i = 0; i < p.nodes(); ++i)
      if (p.contains(i, k)) {
        out.push_back(k);
        break;
      }
  return out;
}

}  // namespace detail

// Greedy reservation packing. Pairs (i, k) are visited once each in
// decreasing lambda_i^k, ties by (node, video); a pair is accepted when both
// the system budget alpha * sum D_i and node i's residual admit s_k.
inline ReservationResult reservation_packing(const PlacementProblem& prob, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  const auto m = static_cast<std::size_t>(prob.nodes());
  const auto n = static_cast<std::size_t>(prob.videos());
  ReservationResult out{Placement(prob.nodes(), prob.videos()), prob.capacities, {}};

  double budget = alpha * prob.total_capacity();
  if (budget > 0.0 && n > 0) {
    const double smallest = *std::min_element(prob.sizes.begin(), prob.sizes.end());
    std::vector<std::uint32_t> order(m * n);
    std::iota(order.begin(), order.end(), 0u);
    const auto& lam = prob.demand.data();
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (lam[a] != lam[b]) return lam[a] > lam[b];
      return a < b;  // row-major index order is (node, video) lexicographic
    });
    for (auto idx : order) {
      if (budget < smallest) break;
      const auto i = static_cast<NodeId>(idx / n);
      const auto k = static_cast<VideoId>(idx % n);
      const double s = prob.sizes[static_cast<std::size_t>(k)];
      auto& residual = out.residual[static_cast<std::size_t>(i)];
      if (budget >= s && residual >= s) {
        out.placement.add(i, k);
        budget -= s;
        residual -= s;
      }
    }
  }
  out.covered = detail::covered_set(out.placement);
  return out;
}

// Per-node variant used by IRS: node i spends at most alpha * D_i on its own
// most requested videos.
inline ReservationResult individual_reservation(const PlacementProblem& prob, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  ReservationResult out{Placement(prob.nodes(), prob.videos()), prob.capacities, {}};
  std::vector<VideoId> order(static_cast<std::size_t>(prob.videos()));
  for (NodeId i = 0; i < prob.nodes(); ++i) {
    double budget = alpha * prob.capacities[static_cast<std::size_t>(i)];
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](VideoId a, VideoId b) {
      if (prob.demand(i, a) != prob.demand(i, b)) return prob.demand(i, a) > prob.demand(i, b);
      return a < b;
    });
    for (VideoId k : order) {
      const double s = prob.sizes[static_cast<std::size_t>(k)];
      if (s <= budget) {
        out.placement.add(i, k);
        budget -= s;
        out.residual[static_cast<std::size_t>(i)] -= s;
      }
    }
  }
  out.covered = detail::covered_set(out.placement);
  return out;
}

struct OcmhpResult {
  std::vector<std::vector<VideoId>> added;  // S'_i in placement order
  std::vector<double> residual;
};

// One-copy assignment of the videos in `remaining` into residual capacity,
// greedy by regret. Each round: Q_k = {i : s_k <= D'_i}; infeasible if some
// Q_k is empty; otherwise place the video with the largest regret
// (lambda at its best node minus lambda at the runner-up; a video with a
// single candidate node goes first) at its best node. Ties go to the lower
// video id, then the lower node id. Returns nullopt when infeasible.
inline std::optional<OcmhpResult> ocmhp_greedy(const PlacementProblem& prob, const std::vector<VideoId>& remaining,
                                               std::vector<double> residual,
                                               RegretRule rule = RegretRule::max_regret) {
  OcmhpResult out;
  out.added.assign(static_cast<std::size_t>(prob.nodes()), {});
  out.residual = std::move(residual);
  if (remaining.empty()) return out;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  struct Candidate {
    VideoId video;
    NodeId best = -1;
    NodeId second = -1;
    bool placed = false;
  };
  std::vector<Candidate> cand;
  cand.reserve(remaining.size());
  for (VideoId k : remaining) cand.push_back({k});

  auto refresh = [&](Candidate& c) {
    const double s = prob.sizes[static_cast<std::size_t>(c.video)];
    c.best = c.second = -1;
    for (NodeId i = 0; i < prob.nodes(); ++i) {
      if (s > out.residual[static_cast<std::size_t>(i)]) continue;
      const double l = prob.demand(i, c.video);
      if (c.best < 0 || l > prob.demand(c.best, c.video)) {
        c.second = c.best;
        c.best = i;
      } else if (c.second < 0 || l > prob.demand(c.second, c.video)) {
        c.second = i;
      }
    }
  };
  // Larger key is picked first.
  auto key = [&](const Candidate& c) {
    if (c.second < 0) return kInf;
    const double margin = prob.demand(c.best, c.video) - prob.demand(c.second, c.video);
    return rule == RegretRule::max_regret ? margin : -margin;
  };

  for (auto& c : cand) {
    refresh(c);
    if (c.best < 0) return std::nullopt;
  }
  for (std::size_t placed = 0; placed < cand.size(); ++placed) {
    std::size_t pick = cand.size();
    double pick_key = -kInf;
    for (std::size_t q = 0; q < cand.size(); ++q) {
      if (cand[q].placed) continue;
      const double kq = key(cand[q]);
      if (pick == cand.size() || kq > pick_key || (kq == pick_key && cand[q].video < cand[pick].video)) {
        pick = q;
        pick_key = kq;
      }
    }
    auto& c = cand[pick];
    c.placed = true;
    const NodeId node = c.best;
    out.added[static_cast<std::size_t>(node)].push_back(c.video);
    auto& left = out.residual[static_cast<std::size_t>(node)];
    left -= prob.sizes[static_cast<std::size_t>(c.video)];
    // Only candidates that just lost `node` from Q_k can change, and only if
    // it was their best or runner-up.
    for (auto& o : cand) {
      if (o.placed || prob.sizes[static_cast<std::size_t>(o.video)] <= left) continue;
      if (o.best == node || o.second == node) {
        refresh(o);
        if (o.best < 0) return std::nullopt;
      }
    }
  }
  return out;
}

// Density-ordered knapsack fill for node i: candidates in decreasing
// lambda_i^k (profit s_k * lambda_i^k per unit size s_k), ties by video id;
// anything that does not fit is skipped.
inline std::vector<VideoId> knapsack_fill(const PlacementProblem& prob, NodeId i, std::vector<VideoId> candidates,
                                          double residual) {
  std::sort(candidates.begin(), candidates.end(), [&](VideoId a, VideoId b) {
    if (prob.demand(i, a) != prob.demand(i, b)) return prob.demand(i, a) > prob.demand(i, b);
    return a < b;
  });
  std::vector<VideoId> chosen;
  for (VideoId k : candidates) {
    const double s = prob.sizes[static_cast<std::size_t>(k)];
    if (s <= residual) {
      chosen.push_back(k);
      residual -= s;
    }
  }
  return chosen;
}

namespace detail {

// Steps 2-4 of the alpha heuristic applied to a reservation result; with
// fill = false the knapsack step is skipped.
inline PlacementResult complete_placement(const PlacementProblem& prob, ReservationResult reserved, double alpha,
                                          RegretRule rule, bool fill = true) {
  PlacementResult res;
  res.alpha = alpha;
  std::vector<bool> covered(static_cast<std::size_t>(prob.videos()), false);
  for (VideoId k : reserved.covered) covered[static_cast<std::size_t>(k)] = true;
  std::vector<VideoId> remaining;
  for (VideoId k = 0; k < prob.videos(); ++k)
    if (!covered[static_cast<std::size_t>(k)]) remaining.push_back(k);
  res.uncovered_after_reservation = remaining.size();

  auto one_copy = ocmhp_greedy(prob, remaining, std::move(reserved.residual), rule);
  if (!one_copy) {
    res.placement = std::move(reserved.placement);
    res.feasible = false;
    return res;
  }
  Placement p = std::move(reserved.placement);
  for (NodeId i = 0; i < prob.nodes(); ++i)
    for (VideoId k : one_copy->added[static_cast<std::size_t>(i)]) p.add(i, k);
  for (NodeId i = 0; i < prob.nodes() && fill; ++i) {
    std::vector<VideoId> candidates;
    for (VideoId k = 0; k < prob.videos(); ++k)
      if (!p.contains(i, k)) candidates.push_back(k);
    for (VideoId k : knapsack_fill(prob, i, std::move(candidates), one_copy->residual[static_cast<std::size_t>(i)]))
      p.add(i, k);
  }
  res.objective = placement_objective(p, prob);
  res.placement = std::move(p);
  res.feasible = true;
  return res;
}

}  // namespace detail

// Reservation packing, then one-copy assignment of N \ N_0, then per-node
// knapsack fill, then H(alpha). `feasible` is false when the one-copy step
// fails.
inline PlacementResult alpha_mhp(const PlacementProblem& prob, double alpha, RegretRule rule = RegretRule::max_regret) {
  return detail::complete_placement(prob, reservation_packing(prob, alpha), alpha, rule);
}

// System capacity reservation strategy: alpha = 0 must be feasible; alpha = 1
// is returned when feasible; otherwise bisect on [0, 1] down to `precision`,
// moving towards larger alpha while feasible, and return the best H seen
// among the feasible probes.
inline PlacementResult srs(const PlacementProblem& prob, double precision, RegretRule rule = RegretRule::max_regret) {
  if (!(precision > 0.0)) throw std::invalid_argument("precision must be positive");
  auto best = alpha_mhp(prob, 0.0, rule);
  if (!best.feasible) return best;
  auto high = alpha_mhp(prob, 1.0, rule);
  if (high.feasible) {
    high.frontier_alpha = 1.0;
    return high;
  }
  double lo = 0.0, hi = 1.0;
  while (hi - lo > precision) {
    const double mid = 0.5 * (lo + hi);
    auto r = alpha_mhp(prob, mid, rule);
    if (r.feasible) {
      lo = mid;
      if (r.objective >= best.objective) best = std::move(r);
    } else {
      hi = mid;
    }
  }
  best.frontier_alpha = lo;
  return best;
}

// Individual reservation strategy: every node keeps alpha * D_i for its own
// top videos and the rest of its storage covers the videos nobody reserved;
// alpha is scanned over {0, step, ..., 1} and the best feasible result kept.
// With fill = true leftover space also gets the knapsack pass.
inline PlacementResult irs(const PlacementProblem& prob, double alpha_step, RegretRule rule = RegretRule::max_regret,
                           bool fill = false) {
  if (!(alpha_step > 0.0)) throw std::invalid_argument("alpha step must be positive");
  const auto steps = static_cast<std::int64_t>(std::floor(1.0 / alpha_step + 1e-9));
  PlacementResult best;
  for (std::int64_t j = 0; j <= steps; ++j) {
    const double alpha = std::min(1.0, static_cast<double>(j) * alpha_step);
    auto r = detail::complete_placement(prob, individual_reservation(prob, alpha), alpha, rule, fill);
    if (r.feasible && (!best.feasible || r.objective > best.objective)) best = std::move(r);
  }
  return best;
}

// H(alpha) on a uniform grid, for plotting and monotonicity checks.
struct AlphaPoint {
  double alpha = 0.0;
  bool feasible = false;
  double objective = 0.0;
};

inline std::vector<AlphaPoint> alpha_scan(const PlacementProblem& prob, double step,
                                          RegretRule rule = RegretRule::max_regret) {
  if (!(step > 0.0)) throw std::invalid_argument("alpha step must be positive");
  const auto steps = static_cast<std::int64_t>(std::floor(1.0 / step + 1e-9));
  std::vector<AlphaPoint> out;
  for (std::int64_t j = 0; j <= steps; ++j) {
    const double alpha = std::min(1.0, static_cast<double>(j) * step);
    const auto r = alpha_mhp(prob, alpha, rule);
    out.push_back({alpha, r.feasible, r.feasible ? r.objective : 0.0});
  }
  return out;
}

// Optimal value of the LP relaxation (y in [0, 1]); nullopt when even the
// relaxation is infeasible. Sizes and demand are rescaled to order one before
// solving; the returned bound is in original units.
inline std::optional<double> lp_upper_bound(const PlacementProblem& prob, const lp::Options& opt = {}) {
  const auto m = static_cast<std::size_t>(prob.nodes());
  const auto n = static_cast<std::size_t>(prob.videos());
  if (m * n > lp::kMaxVariables)
    throw std::length_error("instance too large for the dense LP bound (" + std::to_string(m * n) + " variables)");
  const double smax = *std::max_element(prob.sizes.begin(), prob.sizes.end());
  double lmax = 0.0;
  for (double v : prob.demand.data()) lmax = std::max(lmax, v);
  if (!(lmax > 0.0)) lmax = 1.0;

  lp::Problem lpp(m * n);
  auto var = [n](std::size_t i, std::size_t k) { return i * n + k; };
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < n; ++k)
      lpp.set_objective(var(i, k), prob.sizes[k] / smax * prob.demand(static_cast<NodeId>(i), static_cast<VideoId>(k)) / lmax);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t k = 0; k < n; ++k) row.emplace_back(var(i, k), prob.sizes[k] / smax);
    lpp.add_le(row, prob.capacities[i] / smax);
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t i = 0; i < m; ++i) row.emplace_back(var(i, k), 1.0);
    lpp.add_ge(row, 1.0);
  }
  for (std::size_t v = 0; v < m * n; ++v) lpp.add_le({{v, 1.0}}, 1.0);
  const auto r = lp::solve(lpp, opt);
  if (r.status == lp::Status::infeasible) return std::nullopt;
  if (r.status != lp::Status::optimal) throw std::runtime_error("LP bound did not reach optimality");
  return r.objective * smax * lmax;
}

// Exhaustive optimum over y in {0,1}^(M x N); for oracle use on tiny
// instances only.
inline PlacementResult brute_force_mhp(const PlacementProblem& prob) {
  const auto m = static_cast<std::size_t>(prob.nodes());
  const auto n = static_cast<std::size_t>(prob.videos());
  const auto bits = m * n;
  if (bits > 22) throw std::length_error("brute force limited to 22 binary variables");
  PlacementResult best;
  best.placement = Placement(prob.nodes(), prob.videos());
  const std::uint64_t all_videos = (std::uint64_t{1} << n) - 1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bits); ++mask) {
    std::uint64_t cover = 0;
    double h = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i) {
      const std::uint64_t row = (mask >> (i * n)) & all_videos;
      double used = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        if (row >> k & 1U) {
          used += prob.sizes[k];
          h += prob.weight(static_cast<NodeId>(i), static_cast<VideoId>(k));
        }
      ok = used <= prob.capacities[i];
      cover |= row;
    }
    if (!ok || cover != all_videos) continue;
    if (!best.feasible || h > best.objective) {
      best.feasible = true;
      best.objective = h;
      Placement p(prob.nodes(), prob.videos());
      for (std::size_t b = 0; b < bits; ++b)
        if (mask >> b & 1U) p.add(static_cast<NodeId>(b / n), static_cast<VideoId>(b % n));
      best.placement = std::move(p);
    }
  }
  return best;
}

// Text form: one line per node, "node v1 v2 ..." with ascending video ids.
inline void write_placement(std::ostream& os, const Placement& p) {
  for (NodeId i = 0; i < p.nodes(); ++i) {
    os << i;
    for (VideoId k : p.videos_at(i)) os << ' ' << k;
    os << '\n';
  }
}

inline Placement read_placement(std::istream& is, std::int32_t nodes, std::int32_t videos) {
  Placement p(nodes, videos);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    NodeId i = 0;
    if (!(ls >> i) || i < 0 || i >= nodes)
      throw std::runtime_error("placement line " + std::to_string(lineno) + ": bad node id");
    VideoId k = 0;
    while (ls >> k) {
      if (k < 0 || k >= videos) throw std::runtime_error("placement line " + std::to_string(lineno) + ": bad video id");
      p.add(i, k);
    }
  }
  return p;
}

}  // namespace vcache
