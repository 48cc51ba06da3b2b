#pragma once

// Randomized checks of the approximation guarantees, shared by the unit
// tests and the acceptance runner. Each returns the number of instances
// that break the bound, with exhaustive optima as the reference.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "support.hpp"
#include "vcache/placement.hpp"

namespace vcache::testing {

struct PropertyTally {
  int instances = 0;
  int violations = 0;
  double worst_ratio = 1.0;  // greedy / optimum
  double widest_gap = 0.0;   // feasibility check: last feasible minus first infeasible alpha
  std::string first_violation;
};

// Density-greedy knapsack vs exhaustive optimum with every item at most
// eps * B.
inline PropertyTally knapsack_greedy_check(int instances, double eps, std::uint64_t seed) {
  PropertyTally t;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> size_frac(0.5 * eps, eps), profit(0.1, 10.0);
  std::uniform_int_distribution<int> count(10, 16);
  for (int q = 0; q < instances; ++q) {
    const double budget = 1000.0;
    const int n = count(rng);
    std::vector<double> a(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      a[static_cast<std::size_t>(j)] = size_frac(rng) * budget;
      p[static_cast<std::size_t>(j)] = profit(rng) * a[static_cast<std::size_t>(j)];
    }
    std::vector<std::vector<double>> lambda(1);
    for (int j = 0; j < n; ++j) lambda[0].push_back(p[static_cast<std::size_t>(j)] / a[static_cast<std::size_t>(j)]);
    const auto prob = make_problem(lambda, a, {budget});
    std::vector<VideoId> all(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) all[static_cast<std::size_t>(j)] = j;
    double greedy = 0.0;
    for (VideoId k : knapsack_fill(prob, 0, all, budget)) greedy += p[static_cast<std::size_t>(k)];

    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
      double w = 0.0, v = 0.0;
      for (int j = 0; j < n; ++j)
        if (mask >> j & 1U) {
          w += a[static_cast<std::size_t>(j)];
          v += p[static_cast<std::size_t>(j)];
        }
      if (w <= budget && v > best) best = v;
    }
    ++t.instances;
    const double ratio = greedy / best;
    t.worst_ratio = std::min(t.worst_ratio, ratio);
    if (greedy < (1.0 - eps) * best - 1e-9 * best) {
      if (!t.violations) t.first_violation = "instance " + std::to_string(q);
      ++t.violations;
    }
  }
  return t;
}

// Reservation packing greedy vs the exhaustive optimum of the same problem
// (total budget alpha * sum D_i, per-node capacities, no coverage).
inline PropertyTally reservation_greedy_check(int instances, std::uint64_t seed) {
  PropertyTally t;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nodes(1, 3), videos(2, 6);
  std::uniform_real_distribution<double> size(1.0, 4.0), cap(8.0, 16.0), lam(0.0, 10.0);
  const double alphas[] = {0.3, 0.5, 0.8, 1.0};
  for (int q = 0; q < instances; ++q) {
    const int m = nodes(rng), n = videos(rng);
    std::vector<double> sizes(static_cast<std::size_t>(n)), caps(static_cast<std::size_t>(m));
    std::vector<std::vector<double>> lambda(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(n)));
    for (auto& s : sizes) s = size(rng);
    for (auto& c : caps) c = cap(rng);
    for (auto& row : lambda)
      for (auto& v : row) v = lam(rng);
    const double alpha = alphas[q % 4];
    const auto prob = make_problem(lambda, sizes, caps);
    const double eps = *std::max_element(sizes.begin(), sizes.end()) / *std::min_element(caps.begin(), caps.end());
    const double greedy = placement_objective(reservation_packing(prob, alpha).placement, prob);

    const double budget = alpha * prob.total_capacity();
    const int bits = m * n;
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1U << bits); ++mask) {
      double total = 0.0, h = 0.0;
      std::vector<double> used(static_cast<std::size_t>(m), 0.0);
      for (int b = 0; b < bits; ++b)
        if (mask >> b & 1U) {
          const int i = b / n, k = b % n;
          total += sizes[static_cast<std::size_t>(k)];
          used[static_cast<std::size_t>(i)] += sizes[static_cast<std::size_t>(k)];
          h += sizes[static_cast<std::size_t>(k)] * lambda[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        }
      bool ok = total <= budget;
      for (int i = 0; i < m && ok; ++i) ok = used[static_cast<std::size_t>(i)] <= caps[static_cast<std::size_t>(i)];
      if (ok && h > best) best = h;
    }
    ++t.instances;
    const double factor = (1.0 - eps) * (1.0 - eps / (alpha * m));
    if (best > 0.0) t.worst_ratio = std::min(t.worst_ratio, greedy / best);
    if (greedy < factor * best - 1e-9 * best) {
      if (!t.violations) t.first_violation = "instance " + std::to_string(q);
      ++t.violations;
    }
  }
  return t;
}

// Feasibility of the alpha heuristic along a 0.01 grid: a violation is an
// infeasible alpha below a feasible one.
inline PropertyTally feasibility_monotone_check(int instances, std::int32_t nodes, std::int32_t videos,
                                                std::uint64_t seed) {
  PropertyTally t;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ratio(0.25, 0.8);
  for (int q = 0; q < instances; ++q) {
    const auto prob = random_instance(nodes, videos, ratio(rng), seed * 1000 + static_cast<std::uint64_t>(q));
    double first_infeasible = -1.0, last_feasible = -1.0;
    for (const auto& p : alpha_scan(prob, 0.01)) {
      if (!p.feasible && first_infeasible < 0.0) first_infeasible = p.alpha;
      if (p.feasible) last_feasible = p.alpha;
    }
    ++t.instances;
    if (first_infeasible >= 0.0 && last_feasible > first_infeasible) {
      if (!t.violations) t.first_violation = "instance " + std::to_string(q);
      ++t.violations;
      t.widest_gap = std::max(t.widest_gap, last_feasible - first_infeasible);
    }
  }
  return t;
}

// Largest relative drop of H between consecutive feasible grid points.
inline double largest_objective_dip(const std::vector<AlphaPoint>& scan) {
  double worst = 0.0;
  for (std::size_t j = 1; j < scan.size(); ++j)
    if (scan[j].feasible && scan[j - 1].feasible && scan[j - 1].objective > 0.0)
      worst = std::max(worst, (scan[j - 1].objective - scan[j].objective) / scan[j - 1].objective);
  return worst;
}

}  // namespace vcache::testing
