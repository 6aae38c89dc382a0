#include "netrecon/platgen.hpp"

#include <algorithm>
#include <cmath>

#include "netrecon/rng.hpp"

namespace netrecon {

namespace {

void check_range(const Range& r, const char* name) {
  if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min <= 0.0 || r.min > r.max)
    throw Error(std::string("invalid ") + name + " range: need 0 < min <= max");
}

std::string padded(char prefix, std::size_t i, std::size_t count) {
  std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
  std::string digits = std::to_string(i);
  return prefix + std::string(width - std::min(width, digits.size()), '0') + digits;
}

}  // namespace

void validate(const GenParams& params) {
  if (params.n_hosts < 1) throw Error("n_hosts must be at least 1");
  if (params.n_backbone_routers < 1) throw Error("n_backbone_routers must be at least 1");
  if (params.clusters < 1) throw Error("clusters must be at least 1");
  check_range(params.wan_latency, "wan_latency");
  check_range(params.lan_latency, "lan_latency");
  check_range(params.wan_bw, "wan_bw");
  check_range(params.lan_bw, "lan_bw");
  std::size_t r = params.n_backbone_routers;
  std::size_t max_extra = r * (r - 1) / 2 - (r - 1);
  if (params.extra_backbone_edges > max_extra)
    throw Error("extra_backbone_edges exceeds the " + std::to_string(max_extra) +
                " router pairs left after the spanning tree");
}

Platform generate(const GenParams& params) {
  validate(params);
  Rng rng(params.seed);
  Platform p("gen-" + std::to_string(params.seed));
  const std::size_t r = params.n_backbone_routers;

  auto wan = [&] {
    double lat = rng.uniform(params.wan_latency.min, params.wan_latency.max);
    double bw = rng.uniform(params.wan_bw.min, params.wan_bw.max);
    return LinkLabel{lat, bw};
  };
  auto lan = [&] {
    double lat = rng.uniform(params.lan_latency.min, params.lan_latency.max);
    double bw = rng.uniform(params.lan_bw.min, params.lan_bw.max);
    return LinkLabel{lat, bw};
  };

  std::vector<NodeIndex> routers;
  for (std::size_t i = 0; i < r; ++i) routers.push_back(p.add_node(padded('r', i, r), NodeKind::router));
  for (std::size_t i = 1; i < r; ++i) {
    std::size_t parent = static_cast<std::size_t>(rng.below(i));
    p.add_link(routers[i], routers[parent], wan());
  }

  if (params.extra_backbone_edges > 0) {
    std::vector<std::pair<NodeIndex, NodeIndex>> free_pairs;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = i + 1; j < r; ++j)
        if (!p.find_link(routers[i], routers[j])) free_pairs.emplace_back(routers[i], routers[j]);
    for (std::size_t k = 0; k < params.extra_backbone_edges; ++k) {
      std::size_t pick = k + static_cast<std::size_t>(rng.below(free_pairs.size() - k));
      std::swap(free_pairs[k], free_pairs[pick]);
      p.add_link(free_pairs[k].first, free_pairs[k].second, wan());
    }
  }

  for (std::size_t h = 0; h < params.n_hosts; ++h) {
    NodeIndex host = p.add_node(padded('h', h, params.n_hosts), NodeKind::host);
    std::size_t cluster = h % params.clusters;
    p.add_link(host, routers[cluster % r], lan());
  }
  p.validate();
  return p;
}

Json gen_params_to_json(const GenParams& g) {
  auto range = [](const Range& r) { return Json::array({r.min, r.max}); };
  return Json{{"n_hosts", g.n_hosts},
              {"n_backbone_routers", g.n_backbone_routers},
              {"clusters", g.clusters},
              {"wan_latency_range", range(g.wan_latency)},
              {"lan_latency_range", range(g.lan_latency)},
              {"wan_bw_range", range(g.wan_bw)},
              {"lan_bw_range", range(g.lan_bw)},
              {"extra_backbone_edges", g.extra_backbone_edges},
              {"seed", g.seed}};
}

GenParams gen_params_from_json(const Json& doc) {
  require_fields(doc,
                 {"n_hosts", "n_backbone_routers", "clusters", "wan_latency_range", "lan_latency_range",
                  "wan_bw_range", "lan_bw_range", "extra_backbone_edges", "seed"},
                 "generator params");
  GenParams g;
  auto range = [&](const char* key, Range& out) {
    if (!doc.contains(key)) return;
    const auto& v = doc[key];
    if (!v.is_array() || v.size() != 2) throw Error(std::string("generator params: '") + key + "' must be [min, max]");
    out = Range{v[0].get<double>(), v[1].get<double>()};
  };
  try {
    if (doc.contains("n_hosts")) g.n_hosts = doc["n_hosts"].get<std::size_t>();
    if (doc.contains("n_backbone_routers")) g.n_backbone_routers = doc["n_backbone_routers"].get<std::size_t>();
    if (doc.contains("clusters")) g.clusters = doc["clusters"].get<std::size_t>();
    if (doc.contains("extra_backbone_edges")) g.extra_backbone_edges = doc["extra_backbone_edges"].get<std::size_t>();
    if (doc.contains("seed")) g.seed = doc["seed"].get<std::uint64_t>();
    range("wan_latency_range", g.wan_latency);
    range("lan_latency_range", g.lan_latency);
    range("wan_bw_range", g.wan_bw);
    range("lan_bw_range", g.lan_bw);
  } catch (const Json::exception& e) {
    throw Error(std::string("generator params: ") + e.what());
  }
  return g;
}

Platform load_platform(const std::filesystem::path& path) {
  try {
    Platform p = platform_from_json(read_json_file(path));
    p.validate();
    return p;
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void save_platform(const Platform& p, const std::filesystem::path& path) {
  write_json_file(path, platform_to_json(p));
}

Observability parse_observability(std::string_view text) {
  if (text == "all" || text == "all-nodes") return Observability::all_nodes;
  if (text == "hosts" || text == "hosts-only") return Observability::hosts_only;
  throw Error("unknown observability '" + std::string(text) + "' (expected all or hosts)");
}

std::string_view to_string(Observability o) {
  return o == Observability::all_nodes ? "all" : "hosts";
}

std::vector<std::string> observable_hosts(const Platform& p, Observability o) {
  std::vector<std::string> ids;
  for (const auto& n : p.nodes())
    if (o == Observability::all_nodes || n.kind == NodeKind::host) ids.push_back(n.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace netrecon
