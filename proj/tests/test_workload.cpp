#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "vcache/workload.hpp"

using namespace vcache;

TEST(Zipf, ThreeRanksExponentOne) {
  // 6/(1+1/2+1/3) = 36/11
  const double norm = 1.0 + 0.5 + 1.0 / 3.0;
  EXPECT_NEAR(6 * zipf_factor(1, 1.0, 3), 6.0 / norm, 1e-12);
  EXPECT_NEAR(6 * zipf_factor(1, 1.0, 3), 3.272727272727, 1e-9);
  EXPECT_NEAR(6 * zipf_factor(2, 1.0, 3), 1.636363636364, 1e-9);
  EXPECT_NEAR(6 * zipf_factor(3, 1.0, 3), 1.090909090909, 1e-9);
}

TEST(Demand, RowsSumToPopulationAndFollowZipfShape) {
  const auto d = generate_demand(50, 6, {0.8, 0.8}, {10, 40}, 9);
  for (NodeId i = 0; i < 6; ++i) {
    const double p = d.node_total(i);
    EXPECT_NEAR(p, std::round(p), 1e-9);
    EXPECT_GE(p, 10.0);
    EXPECT_LE(p, 40.0);
    std::vector<double> row;
    for (VideoId k = 0; k < 50; ++k) row.push_back(d(i, k));
    std::sort(row.rbegin(), row.rend());
    for (int r = 0; r < 50; ++r) EXPECT_NEAR(row[static_cast<std::size_t>(r)], p * zipf_factor(r + 1, 0.8, 50), 1e-9);
  }
}

TEST(Demand, SingleVideoGetsWholePopulation) {
  const auto d = generate_demand(1, 3, {0.7, 0.9}, {25, 25}, 4);
  for (NodeId i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(d(i, 0), 25.0);
}

TEST(Demand, RejectsBadRanges) {
  EXPECT_THROW(generate_demand(0, 3, {0.7, 0.9}, {20, 30}, 1), std::invalid_argument);
  EXPECT_THROW(generate_demand(5, 3, {0.9, 0.7}, {20, 30}, 1), std::invalid_argument);
  EXPECT_THROW(generate_demand(5, 3, {0.7, 0.9}, {0, 30}, 1), std::invalid_argument);
}

TEST(Catalog, SizesInRangeAndDeterministic) {
  const auto a = generate_catalog(500, {20e6, 400e6}, 128e3, 5);
  EXPECT_EQ(a, generate_catalog(500, {20e6, 400e6}, 128e3, 5));
  EXPECT_NE(a, generate_catalog(500, {20e6, 400e6}, 128e3, 6));
  double mean = 0.0;
  for (const auto& v : a) {
    EXPECT_GE(v.size_bytes, 20e6);
    EXPECT_LE(v.size_bytes, 400e6);
    EXPECT_EQ(v.size_bytes, std::round(v.size_bytes));
    mean += v.size_bytes / 500.0;
  }
  // uniform mean 210e6, sd 380e6/sqrt(12); 4 standard errors
  EXPECT_NEAR(mean, 210e6, 4 * 380e6 / std::sqrt(12.0 * 500.0));
  EXPECT_THROW(generate_catalog(0, {1, 2}, 1, 1), std::invalid_argument);
}

TEST(Requests, MeanCountMatchesIntensity) {
  const auto d = generate_demand(40, 4, {0.7, 0.9}, {20, 30}, 2);
  const auto s = generate_requests(d, 2000, 20.0, 8);
  const double per_slot = static_cast<double>(s.requests.size()) / 2000.0;
  EXPECT_NEAR(per_slot, 20.0, 0.05 * 20.0);
  for (std::size_t q = 1; q < s.requests.size(); ++q) EXPECT_LE(s.requests[q - 1].slot, s.requests[q].slot);
}

TEST(Requests, PairFrequenciesFollowDemand) {
  DemandMatrix d(2, 1);
  d(0, 0) = 1.0;
  d(1, 0) = 1.0;
  const auto s = generate_requests(d, 1000, 10.0, 3);
  const double n = static_cast<double>(s.requests.size());
  double at0 = 0.0;
  for (const auto& r : s.requests) at0 += r.node == 0;
  EXPECT_NEAR(at0 / n, 0.5, 3.0 * std::sqrt(0.25 / n));
}

TEST(Requests, CollaborativeStreamSkipsCachedPairs) {
  const auto d = generate_demand(10, 3, {0.7, 0.9}, {20, 30}, 2);
  Placement p(3, 10);
  for (VideoId k = 0; k < 5; ++k) p.add(0, k);
  const auto collab = generate_requests(d, 200, 10.0, 1, &p);
  for (const auto& r : collab.requests) EXPECT_FALSE(p.contains(r.node, r.video));
  const auto local = generate_local_requests(d, p, 200, 10.0, 1);
  ASSERT_FALSE(local.requests.empty());
  for (const auto& r : local.requests) EXPECT_TRUE(p.contains(r.node, r.video));
}

TEST(Requests, SplitDemand) {
  DemandMatrix d(2, 2);
  d(0, 0) = 3.0;
  d(0, 1) = 1.0;
  d(1, 0) = 2.0;
  d(1, 1) = 4.0;
  Placement p(2, 2);
  p.add(0, 0);
  p.add(1, 1);
  const auto s = split_demand(d, p);
  EXPECT_DOUBLE_EQ(s.local, 7.0);
  EXPECT_DOUBLE_EQ(s.collaborative, 3.0);
}

TEST(Requests, Errors) {
  const auto d = generate_demand(5, 2, {0.7, 0.9}, {20, 30}, 2);
  EXPECT_THROW(generate_requests(d, 0, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(generate_requests(d, 5, 0.0, 1), std::invalid_argument);
  Placement everything(2, 5);
  for (NodeId i = 0; i < 2; ++i)
    for (VideoId k = 0; k < 5; ++k) everything.add(i, k);
  EXPECT_THROW(generate_requests(d, 5, 1.0, 1, &everything), std::invalid_argument);
}

TEST(Stream, RoundTrip) {
  const auto d = generate_demand(20, 3, {0.7, 0.9}, {20, 30}, 2);
  const auto s = generate_requests(d, 30, 4.0, 11, nullptr, 0.25);
  std::stringstream io;
  write_stream(io, s);
  EXPECT_EQ(read_stream(io), s);
}

TEST(Stream, MalformedInput) {
  std::istringstream bad("0 1 2\n0 1\n");
  EXPECT_THROW(read_stream(bad), std::runtime_error);
  std::istringstream unordered("3 0 0\n1 0 0\n");
  EXPECT_THROW(read_stream(unordered), std::runtime_error);
}

TEST(Seeds, MixedStreamsDiffer) {
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
  EXPECT_EQ(mix_seed(7, 3), mix_seed(7, 3));
}
