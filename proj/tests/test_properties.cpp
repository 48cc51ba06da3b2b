#include <gtest/gtest.h>

#include "properties.hpp"

using namespace vcache;
using namespace vcache::testing;

TEST(Properties, KnapsackGreedyWithSmallItems) {
  for (double eps : {0.1, 0.2}) {
    const auto t = knapsack_greedy_check(100, eps, eps == 0.1 ? 101 : 102);
    EXPECT_EQ(t.instances, 100);
    EXPECT_EQ(t.violations, 0) << "eps " << eps << ": " << t.first_violation;
    EXPECT_GE(t.worst_ratio, 1.0 - eps);
  }
}

TEST(Properties, ReservationPackingGuarantee) {
  const auto t = reservation_greedy_check(100, 7);
  EXPECT_EQ(t.instances, 100);
  EXPECT_EQ(t.violations, 0) << t.first_violation;
}

TEST(Properties, FeasibilityIsAPrefixOfTheAlphaGrid) {
  const auto t = feasibility_monotone_check(20, 5, 200, 3);
  EXPECT_EQ(t.violations, 0) << t.first_violation;
}

TEST(Properties, FeasibilityReentryStaysAtTheThreshold) {
  // Coarse catalogs let the greedy one-copy step fail at one alpha and
  // succeed just above it; the flicker never reaches far past the threshold.
  const auto t = feasibility_monotone_check(100, 4, 40, 3);
  RecordProperty("reentries", t.violations);
  EXPECT_LE(t.widest_gap, 0.05 + 1e-9);
}

TEST(Properties, ObjectiveAlongAlphaDipsOnlySlightly) {
  // With a greedy one-copy step H(alpha) is not exactly monotone; dips stay
  // well under one percent on these instances.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto scan = alpha_scan(random_instance(5, 200, 0.45, seed), 0.01);
    EXPECT_LT(largest_objective_dip(scan), 0.01) << seed;
    EXPECT_TRUE(scan.front().feasible);
  }
}

TEST(Properties, ThresholdFallsAsStorageTightens) {
  std::vector<double> thresholds;
  for (double ratio : {0.26, 0.44, 0.74}) {
    const auto scan = alpha_scan(random_instance(5, 200, ratio, 11), 0.01);
    double last = -1.0;
    for (const auto& p : scan)
      if (p.feasible) last = p.alpha;
    thresholds.push_back(last);
  }
  EXPECT_GT(thresholds[0], thresholds[1]);
  EXPECT_GT(thresholds[1], thresholds[2]);
}
