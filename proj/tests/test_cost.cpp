#include <gtest/gtest.h>

#include <cmath>

#include "vcache/cost.hpp"

using namespace vcache;

TEST(LinkCost, QueueingDelayBelowKnee) {
  EXPECT_DOUBLE_EQ(link_cost(0.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(link_cost(0.5, 1.0), 2.0);
  EXPECT_NEAR(link_cost(0.98, 1.0), 50.0, 1e-9);
}

TEST(LinkCost, LinearPastKnee) {
  // slack 0.01: value 100 at the knee, slope 1e4
  EXPECT_NEAR(link_cost(0.99, 1.0), 100.0, 1e-9);
  EXPECT_NEAR(link_cost(0.995, 1.0), 150.0, 1e-9);
  EXPECT_NEAR(link_cost(1.0, 1.0), 200.0, 1e-9);
  EXPECT_TRUE(std::isfinite(link_cost(5.0, 1.0)));
}

TEST(LinkCost, ContinuousWithMatchingSlopeAtKnee) {
  const double c = 1e9, knee = 0.99 * c, h = 1e-3;
  EXPECT_NEAR(link_cost(knee - h, c), link_cost(knee, c), 1e-12 * link_cost(knee, c) + 1e-15);
  EXPECT_NEAR(link_cost_derivative(knee - 1e-6, c) / link_cost_derivative(knee, c), 1.0, 1e-9);
}

TEST(LinkCost, ConvexOnAGrid) {
  const double c = 100.0;
  for (double f = 0.5; f < 150.0; f += 0.5) {
    const double mid = link_cost(f, c);
    EXPECT_LE(2 * mid, link_cost(f - 0.5, c) + link_cost(f + 0.5, c) + 1e-12) << f;
  }
}

TEST(LinkCost, DerivativeMatchesFiniteDifference) {
  const double c = 10.0;
  for (double f : {0.0, 3.0, 9.0, 9.95, 12.0}) {
    const double h = 1e-6;
    const double fd = (link_cost(f + h, c) - link_cost(f - h, c)) / (2 * h);
    EXPECT_NEAR(link_cost_derivative(f, c), fd, 1e-4 * fd) << f;
  }
}

namespace {

Topology line() {
  // node 0 - router 0 - router 1 - node 1
  return Topology(2, {{0, 1.0, 0}, {1, 1.0, 1}},
                  {{0, 4.0, Endpoint::router(1), Endpoint::router(0)},
                   {1, 2.0, Endpoint::node(0), Endpoint::router(0)},
                   {2, 2.0, Endpoint::node(1), Endpoint::router(1)}});
}

}  // namespace

TEST(FlowTable, PathCostsAndAggregate) {
  const auto t = line();
  FlowTable ft(t);
  const auto& p = t.path(1, 0);
  ASSERT_EQ(p.size(), 3u);
  // idle: 1/2 + 1/4 + 1/2
  EXPECT_DOUBLE_EQ(path_latency(ft, p), 1.25);
  ft.add(p, 1.0);
  // loaded: 1/1 + 1/3 + 1/1
  EXPECT_DOUBLE_EQ(path_latency(ft, p), 2.0 + 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(path_marginal_cost(ft, p, 0.0), path_latency(ft, p));
  EXPECT_DOUBLE_EQ(aggregate_cost(ft), 1.0 * 1.0 + 1.0 / 3.0 + 1.0);
  EXPECT_DOUBLE_EQ(ft.max_utilization(), 0.5);
}

TEST(FlowTable, RollRoundMovesScheduledToRemaining) {
  const auto t = line();
  FlowTable ft(t, {0.5, 0.0, 0.0});
  ft.add(t.path(0, 1), 1.0);
  const double before = ft.total(0);
  ft.roll_round();
  EXPECT_DOUBLE_EQ(ft.total(0), before);
  EXPECT_DOUBLE_EQ(ft.ss[0], 0.0);
  EXPECT_DOUBLE_EQ(ft.re[0], 1.0);
  EXPECT_DOUBLE_EQ(aggregate_cost(ft), 0.0);
  EXPECT_DOUBLE_EQ(aggregate_cost(ft, 0.99, true), 1.0 * link_cost(1.5, 4.0) + 2 * link_cost(1.0, 2.0));
}

TEST(FlowTable, BackgroundSizeChecked) {
  EXPECT_THROW(FlowTable(line(), {1.0}), std::invalid_argument);
}
