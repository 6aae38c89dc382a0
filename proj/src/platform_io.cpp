#include "netrecon/platform_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace netrecon {

void require_fields(const Json& obj, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
  if (!obj.is_object()) throw Error(std::string(where) + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw Error(std::string(where) + ": unknown field '" + key + "'");
  }
}

Json platform_to_json(const Platform& p) {
  Json nodes = Json::array();
  for (const auto& n : p.nodes()) nodes.push_back({{"id", n.id}, {"kind", to_string(n.kind)}});
  Json edges = Json::array();
  for (const auto& l : p.links()) {
    edges.push_back({{"a", p.node(l.a).id},
                     {"b", p.node(l.b).id},
                     {"latency_ms", l.label.latency_ms},
                     {"bandwidth_mbps", l.label.bandwidth_mbps}});
  }
  return Json{{"name", p.name()}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

namespace {

template <typename T>
T field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw Error(where + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw Error(where + ": bad value for '" + key + "'");
  }
}

}  // namespace

Platform platform_from_json(const Json& doc) {
  require_fields(doc, {"name", "nodes", "edges"}, "platform");
  Platform p(field<std::string>(doc, "name", "platform"));
  if (!doc.contains("nodes") || !doc["nodes"].is_array()) throw Error("platform: 'nodes' must be a list");
  if (!doc.contains("edges") || !doc["edges"].is_array()) throw Error("platform: 'edges' must be a list");
  std::size_t i = 0;
  for (const auto& n : doc["nodes"]) {
    std::string where = "nodes[" + std::to_string(i++) + "]";
    require_fields(n, {"id", "kind"}, where);
    try {
      p.add_node(field<std::string>(n, "id", where), parse_node_kind(field<std::string>(n, "kind", where)));
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
  }
  i = 0;
  for (const auto& e : doc["edges"]) {
    std::string where = "edges[" + std::to_string(i++) + "]";
    require_fields(e, {"a", "b", "latency_ms", "bandwidth_mbps"}, where);
    LinkLabel label{field<double>(e, "latency_ms", where), field<double>(e, "bandwidth_mbps", where)};
    try {
      p.add_link(field<std::string>(e, "a", where), field<std::string>(e, "b", where), label);
    } catch (const Error& err) {
      throw Error(where + ": " + err.what());
    }
  }
  return p;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(path.string() + ": parse error at byte " + std::to_string(e.byte));
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace netrecon
