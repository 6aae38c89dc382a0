#pragma once

// Ground-truth platform representation: a labeled undirected graph with
// deterministic min-latency routing.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace netrecon {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using NodeIndex = std::size_t;
using LinkIndex = std::size_t;

enum class NodeKind { host, router };

std::string_view to_string(NodeKind kind);
NodeKind parse_node_kind(std::string_view text);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::host;
};

/// Link characteristics: latency in milliseconds, bandwidth in MB/s.
struct LinkLabel {
  double latency_ms = 0.0;
  double bandwidth_mbps = 0.0;

  bool operator==(const LinkLabel&) const = default;
};

/// Undirected link; `a` is always the endpoint with the smaller index.
struct Link {
  NodeIndex a = 0;
  NodeIndex b = 0;
  LinkLabel label;
};

struct Adjacency {
  NodeIndex neighbor;
  LinkIndex link;
};

class Platform {
 public:
  explicit Platform(std::string name = {}) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  /// Throws "duplicate node" if the id is already present.
  NodeIndex add_node(std::string id, NodeKind kind);

  /// Rejects self-loops, parallel links and non-positive or non-finite labels.
  LinkIndex add_link(NodeIndex a, NodeIndex b, LinkLabel label);
  LinkIndex add_link(std::string_view a, std::string_view b, LinkLabel label);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Link> links() const { return links_; }
  const Node& node(NodeIndex i) const { return nodes_.at(i); }
  const Link& link(LinkIndex i) const { return links_.at(i); }
  std::span<const Adjacency> neighbors(NodeIndex i) const { return adjacency_.at(i); }

  std::optional<NodeIndex> find_node(std::string_view id) const;
  /// Throws "node not found: <id>".
  NodeIndex node_index(std::string_view id) const;
  std::optional<LinkIndex> find_link(NodeIndex a, NodeIndex b) const;

  /// Position of each node in lexicographic id order.
  const std::vector<std::size_t>& id_rank() const;

  bool connected() const;
  /// Throws if the platform is empty or disconnected.
  void validate() const;

 private:
  static std::uint64_t pair_key(NodeIndex a, NodeIndex b);

  std::string name_;
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<Adjacency>> adjacency_;
  std::unordered_map<std::string, NodeIndex> index_;
  std::unordered_map<std::uint64_t, LinkIndex> link_index_;
  mutable std::vector<std::size_t> rank_cache_;
};

/// A simple path. `nodes` has one more element than `links`.
struct Route {
  std::vector<NodeIndex> nodes;
  std::vector<LinkIndex> links;

  NodeIndex source() const { return nodes.front(); }
  NodeIndex target() const { return nodes.back(); }
  bool empty() const { return links.empty(); }
  Route reversed() const;

  bool operator==(const Route&) const = default;
};

/// Builds the route following `nodes` through existing links of `p`.
/// Throws if two consecutive nodes are not adjacent or a node repeats.
Route route_through(const Platform& p, std::span<const NodeIndex> nodes);

/// Minimum-latency route; ties broken by fewest hops, then by the
/// lexicographically smallest node-id sequence read from the endpoint with
/// the smaller id. route(p, b, a) is always route(p, a, b) reversed.
Route route(const Platform& p, NodeIndex src, NodeIndex dst);
Route route(const Platform& p, std::string_view src, std::string_view dst);

/// Sum of link latencies. The sum is accumulated from the endpoint with the
/// smaller id so that both orientations give bit-identical values.
double path_latency(const Platform& p, const Route& r);
/// Bottleneck (minimum) link bandwidth.
double path_bandwidth(const Platform& p, const Route& r);

bool routes_share_link(const Platform& p, const Route& r1, const Route& r2);

/// All-pairs routes of a platform, computed once with one shortest-path tree
/// per source. Lookups in either orientation are O(1).
class PlatformRouting {
 public:
  explicit PlatformRouting(const Platform& p);

  const Platform& platform() const { return *platform_; }
  /// Route from src to dst (src != dst).
  Route route(NodeIndex src, NodeIndex dst) const;
  const Route& canonical(NodeIndex a, NodeIndex b) const;

 private:
  const Platform* platform_;
  std::size_t n_;
  std::vector<Route> table_;  // n*n, filled for rank(a) < rank(b)
};

}  // namespace netrecon
