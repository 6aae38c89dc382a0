#include "netrecon/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <tuple>

namespace netrecon {

AccuracyThreshold::AccuracyThreshold(double r) : ratio(r) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw Error("accuracy threshold must be a finite ratio >= 1");
}

bool AccuracyThreshold::accurate(double predicted, double measured) const {
  return std::max(predicted / measured, measured / predicted) <= ratio;
}

namespace {

using Path = std::vector<NodeIndex>;

// Model under construction. Host i is graph node i, so host order and id
// order coincide.
class Workspace {
 public:
  Workspace(const MeasurementSet& ms, std::string builder) : ms_(ms), n_(ms.host_count()) {
    validate(ms);
    model_.graph = Platform("model");
    model_.hosts = ms.hosts;
    for (const auto& h : ms.hosts) model_.host_nodes.push_back(model_.graph.add_node(h, NodeKind::host));
    model_.routes = RouteTable(n_);
    model_.builder = std::move(builder);
    pred_.assign(n_ * n_, std::numeric_limits<double>::quiet_NaN());
    mark_.assign(n_, 0);
  }

  explicit Workspace(const MeasurementSet& ms, Model m) : ms_(ms), n_(ms.host_count()), model_(std::move(m)) {
    if (model_.hosts != ms.hosts) throw Error("model hosts do not match the measurement set");
    for (std::size_t i = 0; i < n_; ++i)
      if (model_.host_nodes[i] != i) throw Error("model graph contains nodes other than the measured hosts");
    if (model_.graph.node_count() != n_) throw Error("model graph contains nodes other than the measured hosts");
    validate(model_);
    pred_.assign(n_ * n_, 0.0);
    mark_.assign(n_, 0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) pred_[i * n_ + j] = path_lat(model_.routes.canonical(i, j));
  }

  std::size_t size() const { return n_; }
  const MeasurementSet& ms() const { return ms_; }
  double meas(std::size_t i, std::size_t j) const { return ms_.lat.at(i, j); }
  double pred(std::size_t i, std::size_t j) const { return i < j ? pred_[i * n_ + j] : pred_[j * n_ + i]; }
  bool routed(std::size_t i, std::size_t j) const { return model_.routes.has(i, j); }
  bool has_edge(std::size_t i, std::size_t j) const { return model_.graph.find_link(i, j).has_value(); }

  bool add_edge(std::size_t i, std::size_t j) {
    if (has_edge(i, j)) return false;
    model_.graph.add_link(i, j, LinkLabel{ms_.lat.at(i, j), ms_.bw.at(i, j)});
    return true;
  }

  void set_route(std::size_t i, std::size_t j, Path path) {
    double lat = path_lat(path);
    model_.routes.set(i, j, std::move(path));
    (i < j ? pred_[i * n_ + j] : pred_[j * n_ + i]) = lat;
  }

  void set_direct(std::size_t i, std::size_t j) {
    add_edge(i, j);
    set_route(i, j, Path{i, j});
  }

  // Latency summed from the endpoint with the smaller index. Every model
  // edge carries the measured latency of its endpoints, so hypothetical
  // edges are priced the same way.
  double path_lat(const Path& path) const {
    double total = 0.0;
    auto edge = [&](NodeIndex u, NodeIndex v) { return ms_.lat.at(u, v); };
    if (path.front() < path.back()) {
      for (std::size_t k = 1; k < path.size(); ++k) total += edge(path[k - 1], path[k]);
    } else {
      for (std::size_t k = path.size() - 1; k > 0; --k) total += edge(path[k], path[k - 1]);
    }
    return total;
  }

  // Stored route a->x, then the edge x-y, then the stored route y->b.
  // Empty when a piece is unrouted or the result is not simple.
  std::optional<Path> compose(std::size_t a, std::size_t x, std::size_t y, std::size_t b) {
    Path out;
    if (a == x) {
      out.push_back(a);
    } else {
      if (!routed(a, x)) return std::nullopt;
      out = model_.routes.oriented(a, x);
    }
    if (y == b) {
      out.push_back(b);
    } else {
      if (!routed(y, b)) return std::nullopt;
      const auto& tail = model_.routes.canonical(y, b);
      if (y < b) out.insert(out.end(), tail.begin(), tail.end());
      else out.insert(out.end(), tail.rbegin(), tail.rend());
    }
    bool simple = true;
    for (NodeIndex v : out) {
      if (mark_[v]) simple = false;
      mark_[v] = 1;
    }
    for (NodeIndex v : out) mark_[v] = 0;
    if (!simple) return std::nullopt;
    return out;
  }

  Model release() && { return std::move(model_); }

 private:
  const MeasurementSet& ms_;
  std::size_t n_;
  Model model_;
  std::vector<double> pred_;
  std::vector<char> mark_;
};

struct Candidate {
  double weight;
  std::size_t i, j;
};

Model build_tree(const MeasurementSet& ms, bool by_latency) {
  Workspace w(ms, by_latency ? "treelat" : "treebw");
  const std::size_t n = w.size();
  std::vector<Candidate> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      edges.push_back({by_latency ? ms.lat.at(i, j) : ms.bw.at(i, j), i, j});
  std::sort(edges.begin(), edges.end(), [&](const Candidate& x, const Candidate& y) {
    if (x.weight != y.weight) return by_latency ? x.weight < y.weight : x.weight > y.weight;
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::vector<std::size_t>> tree(n);
  std::size_t added = 0;
  for (const auto& e : edges) {
    if (added + 1 == n) break;
    std::size_t ri = find(e.i), rj = find(e.j);
    if (ri == rj) continue;
    parent[ri] = rj;
    w.add_edge(e.i, e.j);
    tree[e.i].push_back(e.j);
    tree[e.j].push_back(e.i);
    ++added;
  }

  // Tree paths from every source.
  std::vector<std::size_t> prev(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(prev.begin(), prev.end(), n);
    prev[s] = s;
    std::vector<std::size_t> stack{s};
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : tree[u])
        if (prev[v] == n) {
          prev[v] = u;
          stack.push_back(v);
        }
    }
    for (std::size_t t = s + 1; t < n; ++t) {
      Path path{t};
      while (path.back() != s) path.push_back(prev[path.back()]);
      std::reverse(path.begin(), path.end());
      w.set_route(s, t, std::move(path));
    }
  }
  return std::move(w).release();
}

}  // namespace

Model build_clique(const MeasurementSet& ms) {
  Workspace w(ms, "clique");
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j) w.set_direct(i, j);
  return std::move(w).release();
}

Model build_tree_lat(const MeasurementSet& ms) { return build_tree(ms, true); }
Model build_tree_bw(const MeasurementSet& ms) { return build_tree(ms, false); }

Model improve(Model m, const MeasurementSet& ms, const AccuracyThreshold& t, ImproveStats* stats) {
  std::string tag = "imp" + m.builder;
  Workspace w(ms, std::move(m));
  const std::size_t n = w.size();
  ImproveStats local;
  const std::size_t max_rounds = n * (n - 1) / 2;

  while (true) {
    std::optional<std::pair<std::size_t, std::size_t>> pick;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!t.over_predicted(w.pred(i, j), w.meas(i, j))) continue;
        if (!pick || w.meas(i, j) < w.meas(pick->first, pick->second)) pick = {i, j};
      }
    }
    if (!pick) break;
    if (++local.iterations > max_rounds) throw Error("improve did not converge");
    auto [i, j] = *pick;
    if (w.add_edge(i, j)) ++local.edges_added;
    w.set_route(i, j, Path{i, j});

    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double measured = w.meas(a, b);
        if (!t.over_predicted(w.pred(a, b), measured)) continue;
        std::optional<Path> best;
        double best_gap = std::abs(w.pred(a, b) - measured);
        for (auto [x, y] : {std::pair{i, j}, std::pair{j, i}}) {
          auto candidate = w.compose(a, x, y, b);
          if (!candidate) continue;
          double gap = std::abs(w.path_lat(*candidate) - measured);
          if (gap < best_gap) {
            best_gap = gap;
            best = std::move(candidate);
          }
        }
        if (best) {
          w.set_route(a, b, std::move(*best));
          ++local.reroutes;
        }
      }
    }
  }
  if (stats) *stats = local;
  Model out = std::move(w).release();
  out.builder = tag;
  return out;
}

Model build_aggregate(const MeasurementSet& ms, const AccuracyThreshold& t, double slack) {
  if (!(slack >= 1.0)) throw Error("aggregate slack must be >= 1");
  Workspace w(ms, "aggregate");
  const std::size_t n = w.size();
  auto accurate = [&](const Path& p, std::size_t a, std::size_t b) { return t.accurate(w.path_lat(p), w.meas(a, b)); };
  auto accurate_now = [&](std::size_t a, std::size_t b) { return t.accurate(w.pred(a, b), w.meas(a, b)); };

  std::size_t u = 0, v = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (w.meas(i, j) < w.meas(u, v)) u = i, v = j;
  std::vector<char> connected(n, 0);
  std::vector<std::size_t> members{u, v};
  connected[u] = connected[v] = 1;
  w.set_direct(u, v);

  std::vector<std::pair<std::size_t, std::size_t>> inaccurate;

  // Repairs listed pairs that a route through the fresh edge x-y makes accurate.
  auto rescan = [&](std::size_t x, std::size_t y) {
    std::vector<std::pair<std::size_t, std::size_t>> keep;
    for (auto [a, b] : inaccurate) {
      std::optional<Path> best;
      double best_acc = std::numeric_limits<double>::infinity();
      for (auto [p, q] : {std::pair{x, y}, std::pair{y, x}}) {
        auto candidate = w.compose(a, p, q, b);
        if (!candidate) continue;
        double pred = w.path_lat(*candidate);
        double acc = std::max(pred / w.meas(a, b), w.meas(a, b) / pred);
        if (acc <= t.ratio && acc < best_acc) {
          best_acc = acc;
          best = std::move(candidate);
        }
      }
      if (best) w.set_route(a, b, std::move(*best));
      else keep.emplace_back(a, b);
    }
    inaccurate = std::move(keep);
  };

  while (members.size() < n) {
    std::size_t s = n;
    double s_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      if (connected[c]) continue;
      double d = std::numeric_limits<double>::infinity();
      for (std::size_t m : members) d = std::min(d, w.meas(c, m));
      if (d < s_dist) s_dist = d, s = c;
    }

    std::vector<std::size_t> pending = members;
    std::vector<std::size_t> s_edges;
    double first_lat = 0.0;

    while (!pending.empty()) {
      std::size_t best_c = n;
      std::size_t best_count = 0;
      for (std::size_t c : members) {
        if (w.has_edge(s, c)) continue;
        const double lat = w.meas(s, c);
        if (!s_edges.empty() && lat > slack * first_lat) continue;
        std::size_t count = 0;
        for (std::size_t d : pending) {
          auto path = w.compose(s, s, c, d);
          if (path && accurate(*path, s, d)) ++count;
        }
        if (count == 0 && !s_edges.empty()) continue;
        bool better = best_c == n || count > best_count ||
                      (count == best_count && (lat < w.meas(s, best_c) || (lat == w.meas(s, best_c) && c < best_c)));
        if (better) best_c = c, best_count = count;
      }
      if (best_c == n) break;
      if (s_edges.empty()) first_lat = w.meas(s, best_c);
      w.add_edge(s, best_c);
      s_edges.push_back(best_c);

      std::vector<std::size_t> still;
      for (std::size_t d : pending) {
        auto path = w.compose(s, s, best_c, d);
        if (path && accurate(*path, s, d)) w.set_route(s, d, std::move(*path));
        else still.push_back(d);
      }
      pending = std::move(still);
      rescan(s, best_c);
    }

    // Leftover routes go through the existing edge of s that predicts best.
    for (std::size_t d : pending) {
      std::optional<Path> best;
      double best_acc = std::numeric_limits<double>::infinity();
      for (std::size_t c : s_edges) {
        auto path = w.compose(s, s, c, d);
        if (!path) continue;
        double pred = w.path_lat(*path);
        double acc = std::max(pred / w.meas(s, d), w.meas(s, d) / pred);
        if (acc < best_acc) best_acc = acc, best = std::move(path);
      }
      if (best) {
        w.set_route(s, d, std::move(*best));
        inaccurate.emplace_back(std::min(s, d), std::max(s, d));
      } else {
        w.set_direct(s, d);
        rescan(s, d);
      }
    }
    connected[s] = 1;
    members.push_back(s);
  }

  // Final repair, lowest measured latency first.
  while (!inaccurate.empty()) {
    auto it = std::min_element(inaccurate.begin(), inaccurate.end(), [&](const auto& x, const auto& y) {
      double lx = w.meas(x.first, x.second), ly = w.meas(y.first, y.second);
      return lx != ly ? lx < ly : x < y;
    });
    auto [a, b] = *it;
    inaccurate.erase(it);
    if (accurate_now(a, b)) continue;
    w.set_direct(a, b);
    rescan(a, b);
  }
  return std::move(w).release();
}

Builder parse_builder(std::string_view text) {
  for (Builder b : all_builders())
    if (to_string(b) == text) return b;
  throw Error("unknown builder '" + std::string(text) +
              "' (valid: clique, treelat, treebw, imptreelat, imptreebw, aggregate)");
}

std::string_view to_string(Builder b) {
  switch (b) {
    case Builder::clique: return "clique";
    case Builder::treelat: return "treelat";
    case Builder::treebw: return "treebw";
    case Builder::imptreelat: return "imptreelat";
    case Builder::imptreebw: return "imptreebw";
    case Builder::aggregate: return "aggregate";
  }
  return "?";
}

const std::vector<Builder>& all_builders() {
  static const std::vector<Builder> builders{Builder::clique,     Builder::treelat,   Builder::treebw,
                                             Builder::imptreelat, Builder::imptreebw, Builder::aggregate};
  return builders;
}

Model build(Builder b, const MeasurementSet& ms, const AccuracyThreshold& t, double slack) {
  switch (b) {
    case Builder::clique: return build_clique(ms);
    case Builder::treelat: return build_tree_lat(ms);
    case Builder::treebw: return build_tree_bw(ms);
    case Builder::imptreelat: return improve(build_tree_lat(ms), ms, t);
    case Builder::imptreebw: return improve(build_tree_bw(ms), ms, t);
    case Builder::aggregate: return build_aggregate(ms, t, slack);
  }
  throw Error("unknown builder");
}

}  // namespace netrecon
