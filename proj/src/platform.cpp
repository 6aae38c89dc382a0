#include "netrecon/platform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <tuple>
#include <unordered_set>

namespace netrecon {

std::string_view to_string(NodeKind kind) {
  return kind == NodeKind::host ? "host" : "router";
}

NodeKind parse_node_kind(std::string_view text) {
  if (text == "host") return NodeKind::host;
  if (text == "router") return NodeKind::router;
  throw Error("unknown node kind: " + std::string(text));
}

std::uint64_t Platform::pair_key(NodeIndex a, NodeIndex b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

NodeIndex Platform::add_node(std::string id, NodeKind kind) {
  if (id.empty()) throw Error("empty node id");
  if (index_.contains(id)) throw Error("duplicate node: " + id);
  NodeIndex idx = nodes_.size();
  index_.emplace(id, idx);
  nodes_.push_back(Node{std::move(id), kind});
  adjacency_.emplace_back();
  rank_cache_.clear();
  return idx;
}

LinkIndex Platform::add_link(NodeIndex a, NodeIndex b, LinkLabel label) {
  if (a >= nodes_.size() || b >= nodes_.size()) throw Error("link endpoint out of range");
  if (a == b) throw Error("self-loop on node " + nodes_[a].id);
  const std::string where = nodes_[a].id + "-" + nodes_[b].id;
  if (!std::isfinite(label.latency_ms) || label.latency_ms <= 0.0)
    throw Error("non-positive latency on link " + where);
  if (!std::isfinite(label.bandwidth_mbps) || label.bandwidth_mbps <= 0.0)
    throw Error("non-positive bandwidth on link " + where);
  auto key = pair_key(a, b);
  if (link_index_.contains(key)) throw Error("duplicate link " + where);
  if (a > b) std::swap(a, b);
  LinkIndex idx = links_.size();
  links_.push_back(Link{a, b, label});
  link_index_.emplace(key, idx);
  adjacency_[a].push_back({b, idx});
  adjacency_[b].push_back({a, idx});
  return idx;
}

LinkIndex Platform::add_link(std::string_view a, std::string_view b, LinkLabel label) {
  return add_link(node_index(a), node_index(b), label);
}

std::optional<NodeIndex> Platform::find_node(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex Platform::node_index(std::string_view id) const {
  auto found = find_node(id);
  if (!found) throw Error("node not found: " + std::string(id));
  return *found;
}

std::optional<LinkIndex> Platform::find_link(NodeIndex a, NodeIndex b) const {
  auto it = link_index_.find(pair_key(a, b));
  if (it == link_index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::size_t>& Platform::id_rank() const {
  if (rank_cache_.size() != nodes_.size()) {
    std::vector<NodeIndex> order(nodes_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](NodeIndex x, NodeIndex y) { return nodes_[x].id < nodes_[y].id; });
    rank_cache_.assign(nodes_.size(), 0);
    for (std::size_t r = 0; r < order.size(); ++r) rank_cache_[order[r]] = r;
  }
  return rank_cache_;
}

bool Platform::connected() const {
  if (nodes_.empty()) return false;
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<NodeIndex> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    NodeIndex u = stack.back();
    stack.pop_back();
    for (const auto& adj : adjacency_[u]) {
      if (!seen[adj.neighbor]) {
        seen[adj.neighbor] = 1;
        ++count;
        stack.push_back(adj.neighbor);
      }
    }
  }
  return count == nodes_.size();
}

void Platform::validate() const {
  if (nodes_.empty()) throw Error("platform '" + name_ + "' has no nodes");
  if (!connected()) throw Error("platform '" + name_ + "' is not connected");
}

Route Route::reversed() const {
  Route r{{nodes.rbegin(), nodes.rend()}, {links.rbegin(), links.rend()}};
  return r;
}

Route route_through(const Platform& p, std::span<const NodeIndex> nodes) {
  if (nodes.size() < 2) throw Error("route needs at least two nodes");
  Route r;
  r.nodes.assign(nodes.begin(), nodes.end());
  std::unordered_set<NodeIndex> seen;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= p.node_count()) throw Error("route node out of range");
    if (!seen.insert(nodes[i]).second) throw Error("route is not simple at " + p.node(nodes[i]).id);
    if (i == 0) continue;
    auto link = p.find_link(nodes[i - 1], nodes[i]);
    if (!link)
      throw Error("no link between " + p.node(nodes[i - 1]).id + " and " + p.node(nodes[i]).id);
    r.links.push_back(*link);
  }
  return r;
}

namespace {

// One shortest-path tree from `source`, keeping for every node the best
// (latency, hops, rank sequence) label.
std::vector<std::vector<NodeIndex>> shortest_path_tree(const Platform& p, NodeIndex source) {
  const auto& rank = p.id_rank();
  const std::size_t n = p.node_count();
  std::vector<double> dist(n, 0.0);
  std::vector<std::size_t> hops(n, 0);
  std::vector<std::vector<NodeIndex>> path(n);
  std::vector<char> labeled(n, 0), done(n, 0);

  auto seq_less = [&](const std::vector<NodeIndex>& x, const std::vector<NodeIndex>& y) {
    return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(),
                                        [&](NodeIndex u, NodeIndex v) { return rank[u] < rank[v]; });
  };

  using Entry = std::tuple<double, std::size_t, std::size_t, NodeIndex>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  labeled[source] = 1;
  path[source] = {source};
  queue.emplace(0.0, 0, rank[source], source);

  while (!queue.empty()) {
    auto [d, h, r, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (const auto& adj : p.neighbors(u)) {
      NodeIndex v = adj.neighbor;
      if (done[v]) continue;
      double nd = dist[u] + p.link(adj.link).label.latency_ms;
      std::size_t nh = hops[u] + 1;
      bool better = !labeled[v] || nd < dist[v] ||
                    (nd == dist[v] && (nh < hops[v] || (nh == hops[v] && seq_less(path[u], path[v]))));
      if (!better) continue;
      labeled[v] = 1;
      dist[v] = nd;
      hops[v] = nh;
      path[v] = path[u];
      path[v].push_back(v);
      queue.emplace(nd, nh, rank[v], v);
    }
  }
  return path;
}

}  // namespace

Route route(const Platform& p, NodeIndex src, NodeIndex dst) {
  if (src >= p.node_count() || dst >= p.node_count()) throw Error("node not found");
  if (src == dst) throw Error("route endpoints must differ: " + p.node(src).id);
  const auto& rank = p.id_rank();
  bool flip = rank[src] > rank[dst];
  NodeIndex from = flip ? dst : src;
  NodeIndex to = flip ? src : dst;
  auto tree = shortest_path_tree(p, from);
  if (tree[to].empty()) throw Error("no route between " + p.node(src).id + " and " + p.node(dst).id);
  Route r = route_through(p, tree[to]);
  return flip ? r.reversed() : r;
}

Route route(const Platform& p, std::string_view src, std::string_view dst) {
  return route(p, p.node_index(src), p.node_index(dst));
}

double path_latency(const Platform& p, const Route& r) {
  if (r.empty()) throw Error("empty route");
  const auto& rank = p.id_rank();
  double total = 0.0;
  if (rank[r.source()] < rank[r.target()]) {
    for (LinkIndex l : r.links) total += p.link(l).label.latency_ms;
  } else {
    for (auto it = r.links.rbegin(); it != r.links.rend(); ++it) total += p.link(*it).label.latency_ms;
  }
  return total;
}

double path_bandwidth(const Platform& p, const Route& r) {
  if (r.empty()) throw Error("empty route");
  double bw = p.link(r.links.front()).label.bandwidth_mbps;
  for (LinkIndex l : r.links) bw = std::min(bw, p.link(l).label.bandwidth_mbps);
  return bw;
}

bool routes_share_link(const Platform&, const Route& r1, const Route& r2) {
  std::unordered_set<LinkIndex> used(r1.links.begin(), r1.links.end());
  return std::any_of(r2.links.begin(), r2.links.end(), [&](LinkIndex l) { return used.contains(l); });
}

PlatformRouting::PlatformRouting(const Platform& p) : platform_(&p), n_(p.node_count()), table_(n_ * n_) {
  const auto& rank = p.id_rank();
  for (NodeIndex s = 0; s < n_; ++s) {
    auto tree = shortest_path_tree(p, s);
    for (NodeIndex t = 0; t < n_; ++t) {
      if (t == s || rank[t] < rank[s]) continue;
      if (tree[t].empty()) throw Error("no route between " + p.node(s).id + " and " + p.node(t).id);
      table_[s * n_ + t] = route_through(p, tree[t]);
    }
  }
}

const Route& PlatformRouting::canonical(NodeIndex a, NodeIndex b) const {
  if (a >= n_ || b >= n_) throw Error("node not found");
  if (a == b) throw Error("route endpoints must differ");
  const auto& rank = platform_->id_rank();
  return rank[a] < rank[b] ? table_[a * n_ + b] : table_[b * n_ + a];
}

Route PlatformRouting::route(NodeIndex src, NodeIndex dst) const {
  const Route& r = canonical(src, dst);
  return r.source() == src ? r : r.reversed();
}

}  // namespace netrecon
