#include "netrecon/model.hpp"

#include <algorithm>
#include <unordered_set>

namespace netrecon {

RouteTable::RouteTable(std::size_t n_hosts) : n_(n_hosts), paths_(n_hosts * (n_hosts - (n_hosts > 0)) / 2) {}

std::size_t RouteTable::offset(std::size_t i, std::size_t j) const {
  if (i == j || i >= n_ || j >= n_) throw Error("route table index out of range");
  if (i > j) std::swap(i, j);
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

std::vector<NodeIndex> RouteTable::oriented(std::size_t i, std::size_t j) const {
  const auto& p = canonical(i, j);
  if (i < j) return p;
  return {p.rbegin(), p.rend()};
}

void RouteTable::set(std::size_t i, std::size_t j, std::vector<NodeIndex> path) {
  if (i > j) std::reverse(path.begin(), path.end());
  paths_[offset(i, j)] = std::move(path);
}

std::size_t RouteTable::routed_pairs() const {
  return static_cast<std::size_t>(
      std::count_if(paths_.begin(), paths_.end(), [](const auto& p) { return !p.empty(); }));
}

std::size_t Model::host_index(std::string_view id) const {
  auto it = std::lower_bound(hosts.begin(), hosts.end(), id);
  if (it == hosts.end() || *it != id) throw Error("host not in model: " + std::string(id));
  return static_cast<std::size_t>(it - hosts.begin());
}

Route Model::route(std::size_t i, std::size_t j) const {
  if (!routes.has(i, j)) throw Error("unrouted pair " + hosts.at(i) + " - " + hosts.at(j));
  return route_through(graph, routes.oriented(i, j));
}

void validate(const Model& m) {
  const std::size_t n = m.hosts.size();
  if (n < 2) throw Error("model needs at least two hosts");
  if (!std::is_sorted(m.hosts.begin(), m.hosts.end())) throw Error("model hosts are not sorted");
  if (m.host_nodes.size() != n || m.routes.host_count() != n) throw Error("model host tables disagree");
  for (std::size_t i = 0; i < n; ++i) {
    if (m.graph.node(m.host_nodes[i]).id != m.hosts[i]) throw Error("model host " + m.hosts[i] + " is misplaced");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!m.routes.has(i, j)) throw Error("missing route " + m.hosts[i] + " - " + m.hosts[j]);
      const auto& path = m.routes.canonical(i, j);
      if (path.front() != m.host_nodes[i] || path.back() != m.host_nodes[j])
        throw Error("route " + m.hosts[i] + " - " + m.hosts[j] + " has wrong endpoints");
      try {
        route_through(m.graph, path);
      } catch (const Error& e) {
        throw Error("route " + m.hosts[i] + " - " + m.hosts[j] + ": " + e.what());
      }
    }
  }
}

double predict(const Model& m, Quantity q, std::size_t i, std::size_t j) {
  Route r = m.route(i, j);
  return q == Quantity::latency ? path_latency(m.graph, r) : path_bandwidth(m.graph, r);
}

double predict(const Model& m, Quantity q, std::string_view a, std::string_view b) {
  return predict(m, q, m.host_index(a), m.host_index(b));
}

Model exact_model(const Platform& p, Observability o) {
  Model m{p, observable_hosts(p, o), {}, RouteTable(0), "exact"};
  PlatformRouting routing(p);
  m.routes = RouteTable(m.hosts.size());
  for (const auto& h : m.hosts) m.host_nodes.push_back(p.node_index(h));
  for (std::size_t i = 0; i < m.hosts.size(); ++i)
    for (std::size_t j = i + 1; j < m.hosts.size(); ++j)
      m.routes.set(i, j, routing.canonical(m.host_nodes[i], m.host_nodes[j]).nodes);
  return m;
}

Json model_to_json(const Model& m) {
  Json doc = platform_to_json(m.graph);
  doc["builder"] = m.builder;
  doc["hosts"] = m.hosts;
  Json routes = Json::array();
  for (std::size_t i = 0; i < m.hosts.size(); ++i) {
    for (std::size_t j = i + 1; j < m.hosts.size(); ++j) {
      if (!m.routes.has(i, j)) continue;
      std::vector<std::string> ids;
      for (NodeIndex v : m.routes.canonical(i, j)) ids.push_back(m.graph.node(v).id);
      routes.push_back({{"a", m.hosts[i]}, {"b", m.hosts[j]}, {"path", ids}});
    }
  }
  doc["routes"] = std::move(routes);
  return doc;
}

Model model_from_json(const Json& doc) {
  require_fields(doc, {"name", "nodes", "edges", "builder", "hosts", "routes"}, "model");
  Json platform_part = Json::object();
  for (const char* key : {"name", "nodes", "edges"})
    if (doc.contains(key)) platform_part[key] = doc[key];
  Model m{platform_from_json(platform_part), {}, {}, RouteTable(0), {}};
  try {
    m.builder = doc.value("builder", "");
    m.hosts = doc.at("hosts").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw Error(std::string("model: ") + e.what());
  }
  std::sort(m.hosts.begin(), m.hosts.end());
  m.routes = RouteTable(m.hosts.size());
  for (const auto& h : m.hosts) m.host_nodes.push_back(m.graph.node_index(h));
  if (!doc.contains("routes") || !doc["routes"].is_array()) throw Error("model: missing routes");
  std::size_t k = 0;
  for (const auto& r : doc["routes"]) {
    std::string where = "routes[" + std::to_string(k++) + "]";
    require_fields(r, {"a", "b", "path"}, where);
    try {
      std::size_t i = m.host_index(r.at("a").get<std::string>());
      std::size_t j = m.host_index(r.at("b").get<std::string>());
      std::vector<NodeIndex> path;
      for (const auto& id : r.at("path").get<std::vector<std::string>>()) path.push_back(m.graph.node_index(id));
      if (path.size() < 2 || path.front() != m.host_nodes[i] || path.back() != m.host_nodes[j])
        throw Error("path does not join its endpoints");
      m.routes.set(i, j, std::move(path));
    } catch (const Json::exception& e) {
      throw Error(where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  validate(m);
  return m;
}

void save_model(const Model& m, const std::filesystem::path& path) { write_json_file(path, model_to_json(m)); }

Model load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(read_json_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace netrecon
