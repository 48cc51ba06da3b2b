#pragma once

// Synthetic demand: per-node Zipf popularity with independently permuted
// ranks, and per-slot Poisson request streams drawn from it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vcache/model.hpp"
#include "vcache/placement.hpp"

namespace vcache {

// splitmix64 step; derives independent stream seeds from one base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Range&, const Range&) = default;
};

// r^-z normalized over ranks 1..n.
inline double zipf_factor(std::int64_t rank, double exponent, std::int64_t n) {
  double norm = 0.0;
  for (std::int64_t r = 1; r <= n; ++r) norm += std::pow(static_cast<double>(r), -exponent);
  return std::pow(static_cast<double>(rank), -exponent) / norm;
}

// Videos with sizes uniform in [size_range.lo, size_range.hi] bytes, rounded
// to whole bytes, and a common rate.
inline Catalog generate_catalog(std::int32_t count, Range size_range, double rate_bps, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("catalog must contain at least one video");
  if (!(size_range.lo > 0.0 && size_range.lo <= size_range.hi))
    throw std::invalid_argument("size range must satisfy 0 < lo <= hi");
  Rng rng(mix_seed(seed, 0));
  std::uniform_real_distribution<double> size(size_range.lo, size_range.hi);
  Catalog c;
  c.reserve(static_cast<std::size_t>(count));
  for (VideoId k = 0; k < count; ++k) c.push_back({k, std::round(size(rng)), rate_bps, 1});
  return c;
}

// lambda_i^k = p_i * zipf_factor(rank_i(k), z_i), with p_i an integer drawn
// from population_range, z_i drawn from zipf_exponent_range and rank_i an
// independent uniform permutation per node. Each row sums to p_i.
inline DemandMatrix generate_demand(std::int32_t video_count, std::int32_t node_count, Range zipf_exponent_range,
                                    Range population_range, std::uint64_t seed) {
  if (video_count < 1 || node_count < 1) throw std::invalid_argument("empty catalog or node set");
  if (!(zipf_exponent_range.lo > 0.0 && zipf_exponent_range.lo <= zipf_exponent_range.hi))
    throw std::invalid_argument("zipf exponent range must satisfy 0 < lo <= hi");
  if (!(population_range.lo > 0.0 && population_range.lo <= population_range.hi))
    throw std::invalid_argument("population range must satisfy 0 < lo <= hi");

  DemandMatrix d(node_count, video_count);
  Rng rng(mix_seed(seed, 1));
  std::uniform_int_distribution<std::int64_t> population(static_cast<std::int64_t>(std::ceil(population_range.lo)),
                                                         static_cast<std::int64_t>(std::floor(population_range.hi)));
  std::uniform_real_distribution<double> exponent(zipf_exponent_range.lo, zipf_exponent_range.hi);
  std::vector<double> weight(static_cast<std::size_t>(video_count));
  std::vector<VideoId> order(static_cast<std::size_t>(video_count));
  for (NodeId i = 0; i < node_count; ++i) {
    const auto p = static_cast<double>(population(rng));
    const double z = zipf_exponent_range.lo == zipf_exponent_range.hi ? zipf_exponent_range.lo : exponent(rng);
    double norm = 0.0;
    for (std::size_t r = 0; r < weight.size(); ++r) {
      weight[r] = std::pow(static_cast<double>(r + 1), -z);
      norm += weight[r];
    }
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    // order[r] is the video holding rank r+1 at this node
    for (std::size_t r = 0; r < order.size(); ++r) d(i, order[r]) = p * weight[r] / norm;
  }
  return d;
}

inline DemandMatrix generate_demand(const Catalog& catalog, const Topology& topo, Range zipf_exponent_range,
                                    Range population_range, std::uint64_t seed) {
  return generate_demand(static_cast<std::int32_t>(catalog.size()), topo.node_count(), zipf_exponent_range,
                         population_range, seed);
}

struct Request {
  std::int64_t slot = 0;
  NodeId node = 0;
  VideoId video = 0;

  friend bool operator==(const Request&, const Request&) = default;
};

struct RequestStream {
  std::vector<Request> requests;
  double slot_duration_s = 0.1;

  friend bool operator==(const RequestStream&, const RequestStream&) = default;
};

// Which (node, video) pairs a stream may draw from.
enum class PairFilter { all, collaborative, local };

namespace detail {

inline RequestStream draw_requests(const DemandMatrix& demand, std::int64_t slot_count, double intensity,
                                   std::uint64_t seed, const Placement* placement, PairFilter filter,
                                   double slot_duration_s) {
  if (slot_count < 1) throw std::invalid_argument("slot count must be at least 1");
  if (!(intensity > 0.0)) throw std::invalid_argument("intensity must be positive");
  std::vector<double> w(demand.data());
  if (placement && filter != PairFilter::all) {
    for (NodeId i = 0; i < demand.nodes(); ++i)
      for (VideoId k = 0; k < demand.videos(); ++k) {
        const bool cached = placement->contains(i, k);
        if ((filter == PairFilter::collaborative) == cached)
          w[static_cast<std::size_t>(i) * static_cast<std::size_t>(demand.videos()) + static_cast<std::size_t>(k)] = 0.0;
      }
  }
  if (std::accumulate(w.begin(), w.end(), 0.0) <= 0.0) throw std::invalid_argument("demand matrix has no mass to draw from");

  Rng rng(mix_seed(seed, 2));
  std::poisson_distribution<std::int64_t> count(intensity);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  RequestStream out;
  out.slot_duration_s = slot_duration_s;
  for (std::int64_t t = 0; t < slot_count; ++t) {
    const auto n = count(rng);
    for (std::int64_t q = 0; q < n; ++q) {
      const auto idx = pick(rng);
      out.requests.push_back({t, static_cast<NodeId>(idx / static_cast<std::size_t>(demand.videos())),
                              static_cast<VideoId>(idx % static_cast<std::size_t>(demand.videos()))});
    }
  }
  return out;
}

}  // namespace detail

// Poisson(intensity) requests per slot, each (node, video) drawn in
// proportion to lambda. With a placement, only collaborative pairs
// (video not cached at the requesting node) are drawn.
inline RequestStream generate_requests(const DemandMatrix& demand, std::int64_t slot_count, double intensity,
                                       std::uint64_t seed, const Placement* placement = nullptr,
                                       double slot_duration_s = 0.1) {
  return detail::draw_requests(demand, slot_count, intensity, seed, placement,
                               placement ? PairFilter::collaborative : PairFilter::all, slot_duration_s);
}

// Same process restricted to locally cached pairs (cache hits).
inline RequestStream generate_local_requests(const DemandMatrix& demand, const Placement& placement,
                                             std::int64_t slot_count, double intensity, std::uint64_t seed,
                                             double slot_duration_s = 0.1) {
  return detail::draw_requests(demand, slot_count, intensity, seed, &placement, PairFilter::local, slot_duration_s);
}

// Demand mass (requests/second) at cached and uncached pairs.
struct DemandSplit {
  double local = 0.0;
  double collaborative = 0.0;
};

inline DemandSplit split_demand(const DemandMatrix& demand, const Placement& placement) {
  DemandSplit s;
  for (NodeId i = 0; i < demand.nodes(); ++i)
    for (VideoId k = 0; k < demand.videos(); ++k)
      (placement.contains(i, k) ? s.local : s.collaborative) += demand(i, k);
  return s;
}

// Line format: header "# slot_duration_s <value>", then "slot node video"
// per request.
inline void write_stream(std::ostream& os, const RequestStream& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", s.slot_duration_s);
  os << "# slot_duration_s " << buf << '\n';
  for (const auto& r : s.requests) os << r.slot << ' ' << r.node << ' ' << r.video << '\n';
}

inline RequestStream read_stream(std::istream& is) {
  RequestStream s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      double v = 0.0;
      if (hs >> key >> v && key == "slot_duration_s") s.slot_duration_s = v;
      continue;
    }
    std::istringstream ls(line);
    Request r;
    if (!(ls >> r.slot >> r.node >> r.video))
      throw std::runtime_error("request stream line " + std::to_string(lineno) + ": expected 'slot node video'");
    if (!s.requests.empty() && r.slot < s.requests.back().slot)
      throw std::runtime_error("request stream line " + std::to_string(lineno) + ": slots out of order");
    s.requests.push_back(r);
  }
  return s;
}

}  // namespace vcache
