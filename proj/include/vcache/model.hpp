#pragma once

// Domain types: videos, serving nodes, links, single-path topology, demand,
// and the assembled Scenario.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vcache {

using NodeId = std::int32_t;
using VideoId = std::int32_t;
using LinkId = std::int32_t;
using RouterId = std::int32_t;

struct Video {
  VideoId id = 0;
  double size_bytes = 0.0;
  double rate_bps = 0.0;
  std::int32_t piece_count = 1;

  // Playback duration in seconds.
  double duration_s() const { return size_bytes * 8.0 / rate_bps; }

  friend bool operator==(const Video&, const Video&) = default;
};

using Catalog = std::vector<Video>;

struct ServingNode {
  NodeId id = 0;
  double capacity_bytes = 0.0;
  RouterId attached_router = 0;

  friend bool operator==(const ServingNode&, const ServingNode&) = default;
};

// A link endpoint is either a router or a serving node.
struct Endpoint {
  enum class Kind : std::uint8_t { router, node };
  Kind kind = Kind::router;
  std::int32_t index = 0;

  static Endpoint router(RouterId r) { return {Kind::router, r}; }
  static Endpoint node(NodeId n) { return {Kind::node, n}; }

  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

struct Link {
  LinkId id = 0;
  double capacity_bps = 0.0;
  Endpoint a;
  Endpoint b;

  friend bool operator==(const Link&, const Link&) = default;
};

using Path = std::vector<LinkId>;

// Explicit route overrides keyed by (source node, destination node).
using RouteOverrides = std::map<std::pair<NodeId, NodeId>, Path>;

// Static single-path topology. Every ordered node pair (j, i) has exactly one
// path P(j, i); P(i, i) is empty. Paths not given explicitly are the
// shortest-hop paths found by BFS that scans incident links in increasing
// link id, so a rebuild from the same inputs yields the same table.
class Topology {
 public:
  Topology() = default;

  Topology(std::int32_t router_count, std::vector<ServingNode> nodes, std::vector<Link> links,
           const RouteOverrides& overrides = {})
      : router_count_(router_count), nodes_(std::move(nodes)), links_(std::move(links)) {
    if (router_count_ < 0) throw std::invalid_argument("router count must be non-negative");
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
      if (nodes_[n].id != static_cast<NodeId>(n))
        throw std::invalid_argument("serving node ids must be dense and ordered");
    }
    for (std::size_t l = 0; l < links_.size(); ++l) {
      if (links_[l].id != static_cast<LinkId>(l))
        throw std::invalid_argument("link ids must be dense and ordered");
      check_endpoint(links_[l].a);
      check_endpoint(links_[l].b);
    }
    build_routes(overrides);
  }

  std::int32_t router_count() const { return router_count_; }
  std::int32_t node_count() const { return static_cast<std::int32_t>(nodes_.size()); }
  std::int32_t link_count() const { return static_cast<std::int32_t>(links_.size()); }
  const std::vector<ServingNode>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const ServingNode& node(NodeId i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  const Link& link(LinkId l) const { return links_.at(static_cast<std::size_t>(l)); }

  // P(from, to).
  const Path& path(NodeId from, NodeId to) const {
    check_node(from);
    check_node(to);
    return routes_[static_cast<std::size_t>(from) * nodes_.size() + static_cast<std::size_t>(to)];
  }

  const std::vector<Path>& route_table() const { return routes_; }

  friend bool operator==(const Topology& x, const Topology& y) {
    return x.router_count_ == y.router_count_ && x.nodes_ == y.nodes_ && x.links_ == y.links_ &&
           x.routes_ == y.routes_;
  }

 private:
  void check_node(NodeId n) const {
    if (n < 0 || n >= node_count()) throw std::out_of_range("unknown node id " + std::to_string(n));
  }

  void check_endpoint(const Endpoint& e) const {
    const auto limit = e.kind == Endpoint::Kind::router ? router_count_ : node_count();
    if (e.index < 0 || e.index >= limit)
      throw std::invalid_argument("link endpoint refers to a missing element");
  }

  std::int32_t vertex(const Endpoint& e) const {
    return e.kind == Endpoint::Kind::router ? e.index : router_count_ + e.index;
  }

  void build_routes(const RouteOverrides& overrides) {
    const auto vertices = static_cast<std::size_t>(router_count_) + nodes_.size();
    std::vector<std::vector<std::pair<std::int32_t, LinkId>>> adj(vertices);
    for (const auto& l : links_) {
      adj[static_cast<std::size_t>(vertex(l.a))].emplace_back(vertex(l.b), l.id);
      adj[static_cast<std::size_t>(vertex(l.b))].emplace_back(vertex(l.a), l.id);
    }
    for (auto& v : adj) std::sort(v.begin(), v.end(), [](auto& x, auto& y) { return x.second < y.second; });

    const auto m = nodes_.size();
    routes_.assign(m * m, Path{});
    for (std::size_t src = 0; src < m; ++src) {
      const auto s = static_cast<std::size_t>(router_count_) + src;
      std::vector<LinkId> parent_link(vertices, -1);
      std::vector<std::int32_t> parent(vertices, -1);
      std::vector<bool> seen(vertices, false);
      std::deque<std::size_t> queue{s};
      seen[s] = true;
      while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        for (const auto& [w, lid] : adj[u]) {
          const auto wu = static_cast<std::size_t>(w);
          if (seen[wu]) continue;
          seen[wu] = true;
          parent[wu] = static_cast<std::int32_t>(u);
          parent_link[wu] = lid;
          queue.push_back(wu);
        }
      }
      for (std::size_t dst = 0; dst < m; ++dst) {
        if (dst == src) continue;
        const auto d = static_cast<std::size_t>(router_count_) + dst;
        auto it = overrides.find({static_cast<NodeId>(src), static_cast<NodeId>(dst)});
        if (it != overrides.end()) {
          check_walk(static_cast<NodeId>(src), static_cast<NodeId>(dst), it->second);
          routes_[src * m + dst] = it->second;
          continue;
        }
        if (!seen[d])
          throw std::invalid_argument("node " + std::to_string(dst) + " unreachable from node " +
                                      std::to_string(src));
        Path p;
        for (auto v = d; v != s; v = static_cast<std::size_t>(parent[v])) p.push_back(parent_link[v]);
        std::reverse(p.begin(), p.end());
        routes_[src * m + dst] = std::move(p);
      }
    }
    for (const auto& [key, p] : overrides) {
      if (key.first == key.second && !p.empty())
        throw std::invalid_argument("self route must be empty");
    }
  }

  // An explicit route must be a simple walk from node j to node i.
  void check_walk(NodeId j, NodeId i, const Path& p) const {
    if (p.empty()) throw std::invalid_argument("explicit route between distinct nodes is empty");
    std::int32_t at = vertex(Endpoint::node(j));
    std::vector<std::int32_t> visited{at};
    for (LinkId lid : p) {
      if (lid < 0 || lid >= link_count()) throw std::invalid_argument("route uses unknown link");
      const auto& l = links_[static_cast<std::size_t>(lid)];
      const auto va = vertex(l.a), vb = vertex(l.b);
      if (va == at) at = vb;
      else if (vb == at) at = va;
      else throw std::invalid_argument("route is not a connected walk");
      if (std::find(visited.begin(), visited.end(), at) != visited.end())
        throw std::invalid_argument("route revisits an element");
      visited.push_back(at);
    }
    if (at != vertex(Endpoint::node(i))) throw std::invalid_argument("route does not end at destination");
  }

  std::int32_t router_count_ = 0;
  std::vector<ServingNode> nodes_;
  std::vector<Link> links_;
  std::vector<Path> routes_;
};

// Hub-and-spoke backbone: router 0 is the hub, routers 1..R-1 each connect to
// it by one core link, and every router has `nodes_per_router` serving nodes
// on dedicated edge links. Core links take ids 0..R-2, edge links follow in
// node order. For (8, 7) this gives 56 nodes and 7 + 56 = 63 links.
inline Topology build_topology(std::int32_t router_count, std::int32_t nodes_per_router,
                               double core_capacity_bps, double edge_capacity_bps,
                               double node_capacity_bytes = 1.0) {
  if (router_count < 1 || nodes_per_router < 1)
    throw std::invalid_argument("router and node counts must be at least 1");
  std::vector<Link> links;
  for (RouterId r = 1; r < router_count; ++r) {
    links.push_back({static_cast<LinkId>(links.size()), core_capacity_bps, Endpoint::router(r),
                     Endpoint::router(0)});
  }
  std::vector<ServingNode> nodes;
  for (RouterId r = 0; r < router_count; ++r) {
    for (std::int32_t k = 0; k < nodes_per_router; ++k) {
      const auto id = static_cast<NodeId>(nodes.size());
      nodes.push_back({id, node_capacity_bytes, r});
      links.push_back({static_cast<LinkId>(links.size()), edge_capacity_bps, Endpoint::node(id),
                       Endpoint::router(r)});
    }
  }
  return Topology(router_count, std::move(nodes), std::move(links));
}

// Length of P(j, i) in links.
inline std::int32_t path_cost_hops(const Topology& topo, NodeId j, NodeId i) {
  return static_cast<std::int32_t>(topo.path(j, i).size());
}

// Dense node x video matrix of request frequencies (requests/second).
class DemandMatrix {
 public:
  DemandMatrix() = default;
  DemandMatrix(std::int32_t nodes, std::int32_t videos, double fill = 0.0)
      : nodes_(nodes), videos_(videos),
        data_(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(videos), fill) {
    if (nodes < 0 || videos < 0) throw std::invalid_argument("negative demand dimensions");
  }

  std::int32_t nodes() const { return nodes_; }
  std::int32_t videos() const { return videos_; }

  double& operator()(NodeId i, VideoId k) { return data_[index(i, k)]; }
  double operator()(NodeId i, VideoId k) const { return data_[index(i, k)]; }

  const std::vector<double>& data() const { return data_; }

  double node_total(NodeId i) const {
    double s = 0.0;
    for (VideoId k = 0; k < videos_; ++k) s += (*this)(i, k);
    return s;
  }

  friend bool operator==(const DemandMatrix&, const DemandMatrix&) = default;

 private:
  std::size_t index(NodeId i, VideoId k) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(videos_) + static_cast<std::size_t>(k);
  }

  std::int32_t nodes_ = 0;
  std::int32_t videos_ = 0;
  std::vector<double> data_;
};

enum class PlacementStrategy { srs, irs };

// Candidate ordering in the one-copy assignment greedy. `max_regret` picks
// the video whose best node beats its runner-up by the widest margin;
// `min_difference` is the literal min_t(lambda_t - lambda_best) reading,
// which ends up choosing the smallest margin first.
enum class RegretRule { max_regret, min_difference };

enum class SelectionStrategy { linkshare, e2e, nearest, random, te, centralized };

struct PlacementConfig {
  PlacementStrategy strategy = PlacementStrategy::srs;
  double precision = 0.005;
  double irs_step = 0.01;
  bool irs_fill = false;
  RegretRule regret = RegretRule::max_regret;

  friend bool operator==(const PlacementConfig&, const PlacementConfig&) = default;
};

struct SelectionConfig {
  SelectionStrategy strategy = SelectionStrategy::linkshare;
  std::int64_t round_len_slots = 1;
  std::int64_t report_period_slots = 2;
  std::int64_t reschedule_period_slots = 10;
  double delta = 0.0;
  double gamma = 0.99;
  double epsilon = 1e-6;  // centralized solver target gap

  friend bool operator==(const SelectionConfig&, const SelectionConfig&) = default;
};

struct TrafficConfig {
  std::int64_t total_slots = 100;
  double slot_duration_s = 0.1;
  double intensity = 160.0;

  friend bool operator==(const TrafficConfig&, const TrafficConfig&) = default;
};

struct Seeds {
  std::uint64_t catalog = 1;
  std::uint64_t demand = 2;
  std::uint64_t requests = 3;
  std::uint64_t selection = 4;

  friend bool operator==(const Seeds&, const Seeds&) = default;
};

struct Scenario {
  Catalog catalog;
  Topology topology;
  DemandMatrix demand;
  Seeds seeds;
  PlacementConfig placement;
  SelectionConfig selection;
  TrafficConfig traffic;
  std::vector<double> background_bps;  // f_l^bg per link

  double total_catalog_bytes() const {
    double s = 0.0;
    for (const auto& v : catalog) s += v.size_bytes;
    return s;
  }

  double total_capacity_bytes() const {
    double s = 0.0;
    for (const auto& n : topology.nodes()) s += n.capacity_bytes;
    return s;
  }

  // Sum of video sizes over sum of node capacities.
  double capacity_ratio() const { return total_catalog_bytes() / total_capacity_bytes(); }

  std::vector<double> sizes() const {
    std::vector<double> s;
    s.reserve(catalog.size());
    for (const auto& v : catalog) s.push_back(v.size_bytes);
    return s;
  }

  std::vector<double> capacities() const {
    std::vector<double> c;
    for (const auto& n : topology.nodes()) c.push_back(n.capacity_bytes);
    return c;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Lists every broken invariant; an empty result means the scenario is usable.
inline std::vector<std::string> validate_scenario(const Scenario& s) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < s.catalog.size(); ++k) {
    const auto& v = s.catalog[k];
    const auto tag = "video " + std::to_string(k);
    if (v.id != static_cast<VideoId>(k)) out.push_back(tag + ": id does not match position");
    if (!(v.size_bytes > 0.0)) out.push_back(tag + ": size must be positive");
    if (!(v.rate_bps > 0.0)) out.push_back(tag + ": rate must be positive");
    if (v.piece_count < 1) out.push_back(tag + ": piece count must be at least 1");
  }
  const auto& topo = s.topology;
  for (const auto& n : topo.nodes()) {
    const auto tag = "node " + std::to_string(n.id);
    if (!(n.capacity_bytes > 0.0)) out.push_back(tag + ": capacity must be positive");
    if (n.attached_router < 0 || n.attached_router >= topo.router_count())
      out.push_back(tag + ": attached router does not exist");
  }
  for (const auto& l : topo.links()) {
    if (!(l.capacity_bps > 0.0)) out.push_back("link " + std::to_string(l.id) + ": capacity must be positive");
  }
  if (s.demand.nodes() != topo.node_count() || s.demand.videos() != static_cast<std::int32_t>(s.catalog.size())) {
    out.push_back("demand: dimensions " + std::to_string(s.demand.nodes()) + "x" +
                  std::to_string(s.demand.videos()) + " do not match nodes x videos");
  } else {
    for (NodeId i = 0; i < s.demand.nodes(); ++i)
      for (VideoId k = 0; k < s.demand.videos(); ++k)
        if (!(s.demand(i, k) >= 0.0))
          out.push_back("demand (" + std::to_string(i) + "," + std::to_string(k) + "): negative entry");
  }
  if (!s.background_bps.empty() && s.background_bps.size() != static_cast<std::size_t>(topo.link_count())) {
    out.push_back("background: expected one entry per link");
  } else {
    for (std::size_t l = 0; l < s.background_bps.size(); ++l) {
      const auto bg = s.background_bps[l];
      if (bg < 0.0) out.push_back("link " + std::to_string(l) + ": negative background load");
      if (bg > topo.links()[l].capacity_bps)
        out.push_back("link " + std::to_string(l) + ": background load exceeds capacity");
    }
  }
  if (s.selection.round_len_slots < 1 || s.selection.report_period_slots < 1 ||
      s.selection.reschedule_period_slots < 1)
    out.push_back("selection: all periods must be at least 1 slot");
  if (!(s.selection.gamma > 0.0 && s.selection.gamma < 1.0)) out.push_back("selection: gamma must be in (0,1)");
  if (!(s.selection.delta >= 0.0 && s.selection.delta < 1.0)) out.push_back("selection: delta must be in [0,1)");
  if (!(s.traffic.slot_duration_s > 0.0)) out.push_back("traffic: slot duration must be positive");
  if (s.traffic.total_slots < 0) out.push_back("traffic: slot count must be non-negative");
  if (!(s.traffic.intensity >= 0.0)) out.push_back("traffic: intensity must be non-negative");
  return out;
}

}  // namespace vcache
