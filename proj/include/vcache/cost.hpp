#pragma once

// Load-dependent link cost and the per-link load table.
//
// zeta(f) is the M/M/1 delay 1/(C - f) up to the knee gamma*C and its
// first-order extension beyond it, so the cost stays finite and convex for
// any load, including overload.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "vcache/model.hpp"

namespace vcache {

inline double link_cost(double load_bps, double capacity_bps, double gamma = 0.99) {
  const double knee = gamma * capacity_bps;
  if (load_bps < knee) return 1.0 / (capacity_bps - load_bps);
  const double slack = (1.0 - gamma) * capacity_bps;
  return 1.0 / slack + (load_bps - knee) / (slack * slack);
}

// d zeta / d f.
inline double link_cost_derivative(double load_bps, double capacity_bps, double gamma = 0.99) {
  if (load_bps < gamma * capacity_bps) {
    const double d = capacity_bps - load_bps;
    return 1.0 / (d * d);
  }
  const double slack = (1.0 - gamma) * capacity_bps;
  return 1.0 / (slack * slack);
}

// Per-link load split into traffic scheduled this round (ss), background
// (bg) and traffic still running from earlier rounds (re).
struct FlowTable {
  std::vector<double> ss;
  std::vector<double> bg;
  std::vector<double> re;
  std::vector<double> capacity;

  FlowTable() = default;

  explicit FlowTable(const Topology& topo, const std::vector<double>& background = {}) {
    const auto n = static_cast<std::size_t>(topo.link_count());
    ss.assign(n, 0.0);
    re.assign(n, 0.0);
    bg = background.empty() ? std::vector<double>(n, 0.0) : background;
    if (bg.size() != n) throw std::invalid_argument("background load must have one entry per link");
    for (const auto& l : topo.links()) capacity.push_back(l.capacity_bps);
  }

  std::size_t size() const { return capacity.size(); }
  double total(LinkId l) const {
    const auto i = static_cast<std::size_t>(l);
    return ss[i] + bg[i] + re[i];
  }
  double utilization(LinkId l) const { return total(l) / capacity[static_cast<std::size_t>(l)]; }

  double max_utilization() const {
    double u = 0.0;
    for (std::size_t l = 0; l < size(); ++l) u = std::max(u, utilization(static_cast<LinkId>(l)));
    return u;
  }

  void add(const Path& p, double rate_bps) {
    for (LinkId l : p) ss[static_cast<std::size_t>(l)] += rate_bps;
  }

  // Start of a new round: what was scheduled so far becomes remaining traffic.
  void roll_round() {
    for (std::size_t l = 0; l < size(); ++l) {
      re[l] += ss[l];
      ss[l] = 0.0;
    }
  }

  friend bool operator==(const FlowTable&, const FlowTable&) = default;
};

// Tentative cost d'_ji of path p with `added_rate_bps` more traffic on it.
inline double path_marginal_cost(const FlowTable& ft, const Path& p, double added_rate_bps, double gamma = 0.99) {
  double c = 0.0;
  for (LinkId l : p) c += link_cost(ft.total(l) + added_rate_bps, ft.capacity[static_cast<std::size_t>(l)], gamma);
  return c;
}

// Current end-to-end cost of path p as a probe would measure it.
inline double path_latency(const FlowTable& ft, const Path& p, double gamma = 0.99) {
  return path_marginal_cost(ft, p, 0.0, gamma);
}

// g = sum_l f_l^ss zeta_l(f_l). With include_remaining, traffic from earlier
// rounds is weighted too: sum_l (f_l^ss + f_l^re) zeta_l(f_l).
inline double aggregate_cost(const FlowTable& ft, double gamma = 0.99, bool include_remaining = false) {
  double g = 0.0;
  for (std::size_t l = 0; l < ft.size(); ++l) {
    const double w = ft.ss[l] + (include_remaining ? ft.re[l] : 0.0);
    if (w != 0.0) g += w * link_cost(ft.total(static_cast<LinkId>(l)), ft.capacity[l], gamma);
  }
  return g;
}

}  // namespace vcache
