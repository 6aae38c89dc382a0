#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "netrecon/platgen.hpp"
#include "netrecon/platform_io.hpp"
#include "support.hpp"

using namespace netrecon;
using namespace netrecon::testing;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "netrecon_test_platgen";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

bool in_range(double v, const Range& r) { return v >= r.min && v <= r.max; }

}  // namespace

TEST_CASE("generation is a pure function of its parameters") {
  GenParams g;
  g.seed = 42;
  CHECK(platform_to_json(generate(g)).dump() == platform_to_json(generate(g)).dump());
  GenParams other = g;
  other.seed = 43;
  CHECK(platform_to_json(generate(g)).dump() != platform_to_json(generate(other)).dump());
}

TEST_CASE("default-sized platform has 60 hosts and enough routers") {
  GenParams g;
  g.n_hosts = 60;
  g.clusters = 6;
  Platform p = generate(g);
  std::size_t hosts = 0, routers = 0;
  for (const auto& n : p.nodes()) (n.kind == NodeKind::host ? hosts : routers)++;
  CHECK(hosts == 60);
  CHECK(routers >= 6);
  CHECK(p.connected());
}

TEST_CASE("edge counts follow the construction rule") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GenParams g;
    g.n_hosts = 25;
    g.n_backbone_routers = 7;
    g.clusters = 4;
    g.extra_backbone_edges = 0;
    g.seed = seed;
    Platform tree = generate(g);
    CHECK(tree.link_count() == (g.n_backbone_routers - 1) + g.n_hosts);
    g.extra_backbone_edges = 3;
    Platform meshed = generate(g);
    CHECK(meshed.link_count() == (g.n_backbone_routers - 1) + g.n_hosts + 3);
  }
}

TEST_CASE("labels stay within their ranges and clusters are stars") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GenParams g;
    g.n_hosts = 30;
    g.n_backbone_routers = 5;
    g.clusters = 7;
    g.seed = seed;
    Platform p = generate(g);
    REQUIRE(p.connected());
    for (const auto& l : p.links()) {
      bool wan = p.node(l.a).kind == NodeKind::router && p.node(l.b).kind == NodeKind::router;
      CHECK(in_range(l.label.latency_ms, wan ? g.wan_latency : g.lan_latency));
      CHECK(in_range(l.label.bandwidth_mbps, wan ? g.wan_bw : g.lan_bw));
    }
    for (NodeIndex i = 0; i < p.node_count(); ++i)
      if (p.node(i).kind == NodeKind::host) {
        REQUIRE(p.neighbors(i).size() == 1);
        CHECK(p.node(p.neighbors(i)[0].neighbor).kind == NodeKind::router);
      }
  }
}

TEST_CASE("invalid parameters are rejected") {
  GenParams g;
  g.n_hosts = 0;
  CHECK_THROWS_AS(generate(g), Error);
  g = GenParams{};
  g.wan_latency = {10, 5};
  CHECK_THROWS_AS(generate(g), Error);
  g = GenParams{};
  g.lan_bw = {0, 5};
  CHECK_THROWS_AS(generate(g), Error);
  g = GenParams{};
  g.n_backbone_routers = 3;
  g.extra_backbone_edges = 2;
  CHECK_THROWS_WITH_AS(generate(g), doctest::Contains("extra_backbone_edges"), Error);
}

TEST_CASE("bundled fixture loads") {
  Platform p = load_platform(std::filesystem::path(NETRECON_DATA_DIR) / "renater-like.json");
  CHECK(observable_hosts(p, Observability::hosts_only).size() == 11);
  CHECK(p.connected());
}

TEST_CASE("loading rejects invalid platform files") {
  auto zero = scratch("zero.json");
  write(zero, R"({"name":"z","nodes":[{"id":"a","kind":"host"},{"id":"b","kind":"host"}],
                  "edges":[{"a":"a","b":"b","latency_ms":0,"bandwidth_mbps":10}]})");
  CHECK_THROWS_WITH_AS(load_platform(zero), doctest::Contains("non-positive latency"), Error);

  auto dup = scratch("dup.json");
  write(dup, R"({"name":"d","nodes":[{"id":"a","kind":"host"},{"id":"a","kind":"host"}],"edges":[]})");
  CHECK_THROWS_WITH_AS(load_platform(dup), doctest::Contains("duplicate node"), Error);

  auto split = scratch("split.json");
  write(split, R"({"name":"s","nodes":[{"id":"a","kind":"host"},{"id":"b","kind":"host"}],"edges":[]})");
  CHECK_THROWS_WITH_AS(load_platform(split), doctest::Contains("not connected"), Error);

  CHECK_THROWS_AS(load_platform(scratch("missing.json")), Error);
}

TEST_CASE("save and load round trip") {
  GenParams g;
  g.n_hosts = 12;
  g.seed = 9;
  Platform p = generate(g);
  auto path = scratch("gen.json");
  save_platform(p, path);
  CHECK(platform_to_json(load_platform(path)).dump() == platform_to_json(p).dump());
}

TEST_CASE("observable hosts") {
  auto five = make_platform({"e", "d", "c", "b", "a"}, {{"a", "b", 1, 1}, {"b", "c", 1, 1}, {"c", "d", 1, 1}, {"d", "e", 1, 1}});
  CHECK(observable_hosts(five, Observability::all_nodes) == std::vector<std::string>{"a", "b", "c", "d", "e"});
  CHECK(observable_hosts(five, Observability::hosts_only).size() == 5);

  auto star = make_platform({"A", "B", "C", "D"}, {{"A", "X", 1, 1}, {"B", "X", 1, 1}, {"C", "X", 1, 1}, {"D", "X", 1, 1}}, {"X"});
  CHECK(observable_hosts(star, Observability::hosts_only) == std::vector<std::string>{"A", "B", "C", "D"});
  CHECK(observable_hosts(star, Observability::all_nodes).size() == 5);
  CHECK(parse_observability("hosts") == Observability::hosts_only);
  CHECK_THROWS_AS(parse_observability("some"), Error);
}
