#pragma once

// Instance builders shared by the test binaries.

#include <cmath>
#include <string>
#include <vector>

#include "vcache/placement.hpp"
#include "vcache/scenario_io.hpp"
#include "vcache/workload.hpp"

namespace vcache::testing {

// Sizes uniform in 20-400 MB, Zipf 0.7-0.9 with the given population range,
// and equal node capacities set from the capacity ratio.
inline PlacementProblem random_instance(std::int32_t nodes, std::int32_t videos, double capacity_ratio,
                                        std::uint64_t seed, Range population = {20, 30}) {
  const auto catalog = generate_catalog(videos, {20e6, 400e6}, 128e3, seed);
  auto demand = generate_demand(videos, nodes, {0.7, 0.9}, population, seed + 100);
  std::vector<double> sizes;
  double total = 0.0;
  for (const auto& v : catalog) {
    sizes.push_back(v.size_bytes);
    total += v.size_bytes;
  }
  std::vector<double> caps(static_cast<std::size_t>(nodes), std::floor(total / capacity_ratio / nodes));
  return {std::move(demand), std::move(sizes), std::move(caps)};
}

inline PlacementProblem make_problem(const std::vector<std::vector<double>>& lambda, std::vector<double> sizes,
                                     std::vector<double> caps) {
  DemandMatrix d(static_cast<std::int32_t>(lambda.size()), static_cast<std::int32_t>(sizes.size()));
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (std::size_t k = 0; k < sizes.size(); ++k) d(static_cast<NodeId>(i), static_cast<VideoId>(k)) = lambda[i][k];
  return {std::move(d), std::move(sizes), std::move(caps)};
}

inline std::string scenario_path(const std::string& name) { return std::string(VCACHE_SCENARIO_DIR) + "/" + name; }

}  // namespace vcache::testing
