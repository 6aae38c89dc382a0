#include <algorithm>
#include <filesystem>

#include "doctest.h"
#include "netrecon/model.hpp"
#include "netrecon/platgen.hpp"
#include "netrecon/reconstruct.hpp"
#include "netrecon/rng.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace netrecon;
using namespace netrecon::testing;

namespace {

double tree_weight(const Model& m, bool latency) {
  std::vector<double> w;
  for (const auto& l : m.graph.links()) w.push_back(latency ? l.label.latency_ms : l.label.bandwidth_mbps);
  return oracle::canonical_sum(w);
}

MeasurementSet random_measurements(Rng& rng, std::size_t n, bool integer_weights) {
  std::vector<std::string> hosts;
  for (std::size_t i = 0; i < n; ++i) hosts.push_back((i < 10 ? "h0" : "h") + std::to_string(i));
  std::vector<double> lat, bw;
  for (std::size_t k = 0; k < n * (n - 1) / 2; ++k) {
    lat.push_back(integer_weights ? static_cast<double>(1 + rng.below(4)) : rng.uniform(0.1, 150.0));
    bw.push_back(integer_weights ? static_cast<double>(10 * (1 + rng.below(4))) : rng.uniform(10.0, 1000.0));
  }
  return make_measurements(hosts, lat, bw);
}

MeasurementSet generated_measurements(std::uint64_t seed, Observability o) {
  GenParams g;
  g.n_hosts = 14;
  g.n_backbone_routers = 6;
  g.clusters = 4;
  g.extra_backbone_edges = 2;
  g.seed = seed;
  Platform p = generate(g);
  return measure_end_to_end(p, observable_hosts(p, o));
}

void check_labels_are_measured(const Model& m, const MeasurementSet& ms) {
  for (const auto& l : m.graph.links()) {
    std::size_t i = ms.index_of(m.graph.node(l.a).id), j = ms.index_of(m.graph.node(l.b).id);
    REQUIRE(l.label.latency_ms == ms.lat.at(i, j));
    REQUIRE(l.label.bandwidth_mbps == ms.bw.at(i, j));
  }
}

std::size_t count_over_predicted(const Model& m, const MeasurementSet& ms, const AccuracyThreshold& t) {
  std::size_t over = 0;
  for (std::size_t i = 0; i < ms.host_count(); ++i)
    for (std::size_t j = i + 1; j < ms.host_count(); ++j)
      if (t.over_predicted(predict(m, Quantity::latency, i, j), ms.lat.at(i, j))) ++over;
  return over;
}

}  // namespace

TEST_CASE("clique reproduces every measurement") {
  auto ms = make_measurements({"a", "b", "c"}, {1, 2, 3}, {10, 20, 30});
  Model m = build_clique(ms);
  CHECK(m.graph.link_count() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      CHECK(predict(m, Quantity::latency, i, j) == ms.lat.at(i, j));
      CHECK(predict(m, Quantity::bandwidth, i, j) == ms.bw.at(i, j));
    }
  Rng rng(1);
  CHECK(build_clique(random_measurements(rng, 11, false)).graph.link_count() == 55);
}

TEST_CASE("spanning trees on a triangle") {
  auto ms = make_measurements({"a", "b", "c"}, {1, 2, 3}, {100, 50, 10});
  Model lat = build_tree_lat(ms);
  REQUIRE(lat.graph.link_count() == 2);
  CHECK(tree_weight(lat, true) == 3.0);
  Model bw = build_tree_bw(ms);
  REQUIRE(bw.graph.link_count() == 2);
  CHECK(tree_weight(bw, false) == 150.0);
}

TEST_CASE("tree prediction on a 3-chain is additive and bottlenecked") {
  auto p = make_platform({"A", "B", "C"}, {{"A", "B", 1, 100}, {"B", "C", 2, 10}});
  MeasurementSet ms = measure_end_to_end(p, {"A", "B", "C"});
  Model m = build_tree_lat(ms);
  CHECK(m.graph.link_count() == 2);
  CHECK(predict(m, Quantity::latency, "A", "C") == 3.0);
  CHECK(predict(m, Quantity::bandwidth, "A", "C") == 10.0);
  CHECK(predict(m, Quantity::latency, "A", "B") == 1.0);
  CHECK(predict(m, Quantity::bandwidth, "A", "B") == 100.0);
}

TEST_CASE("spanning trees match exhaustive enumeration") {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.below(6);
    auto ms = random_measurements(rng, n, trial % 2 == 0);
    Model lat = build_tree_lat(ms), bw = build_tree_bw(ms);
    REQUIRE(lat.graph.link_count() == n - 1);
    REQUIRE(bw.graph.link_count() == n - 1);
    REQUIRE_NOTHROW(validate(lat));
    REQUIRE_NOTHROW(validate(bw));
    CHECK(tree_weight(lat, true) == oracle::spanning_tree_weight(ms.lat, true));
    CHECK(tree_weight(bw, false) == oracle::spanning_tree_weight(ms.bw, false));
  }
}

TEST_CASE("improve leaves an accurate model unchanged") {
  auto p = make_platform({"A", "B", "C", "D"}, {{"A", "B", 1, 10}, {"B", "C", 2, 10}, {"C", "D", 3, 10}});
  MeasurementSet ms = measure_end_to_end(p, {"A", "B", "C", "D"});
  Model tree = build_tree_lat(ms);
  ImproveStats stats;
  Model out = improve(tree, ms, AccuracyThreshold{}, &stats);
  CHECK(stats.edges_added == 0);
  CHECK(stats.iterations == 0);
  CHECK(out.graph.link_count() == tree.graph.link_count());
  CHECK(out.routes == tree.routes);
}

TEST_CASE("improve closes the over-predicted pair of a 4-cycle") {
  auto p = make_platform({"A", "B", "C", "D"}, {{"A", "B", 1, 10}, {"B", "C", 1, 10}, {"C", "D", 1, 10}, {"A", "D", 1, 10}});
  MeasurementSet ms = measure_end_to_end(p, {"A", "B", "C", "D"});
  Model tree = build_tree_lat(ms);
  // Kruskal keeps A-B, A-D, B-C; C-D goes the long way round.
  CHECK(predict(tree, Quantity::latency, "C", "D") == 3.0);
  const AccuracyThreshold t;
  ImproveStats stats;
  Model out = improve(tree, ms, t, &stats);
  CHECK(stats.edges_added >= 1);
  CHECK(stats.edges_added <= 2);
  CHECK(out.graph.find_link(out.graph.node_index("C"), out.graph.node_index("D")).has_value());
  CHECK(count_over_predicted(out, ms, t) == 0);
  CHECK(out.builder == "imptreelat");
}

TEST_CASE("aggregate on two hosts and on a 3-chain") {
  auto two = make_measurements({"a", "b"}, {4}, {20});
  Model m2 = build_aggregate(two, AccuracyThreshold{});
  CHECK(m2.graph.link_count() == 1);
  CHECK(predict(m2, Quantity::latency, 0, 1) == 4.0);

  auto p = make_platform({"A", "B", "C"}, {{"A", "B", 1, 100}, {"B", "C", 2, 10}});
  MeasurementSet ms = measure_end_to_end(p, {"A", "B", "C"});
  Model m = build_aggregate(ms, AccuracyThreshold{});
  CHECK(m.graph.link_count() == 2);
  CHECK(m.graph.find_link(m.graph.node_index("A"), m.graph.node_index("B")).has_value());
  CHECK(m.graph.find_link(m.graph.node_index("B"), m.graph.node_index("C")).has_value());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      CHECK(AccuracyThreshold{}.accurate(predict(m, Quantity::latency, i, j), ms.lat.at(i, j)));
}

TEST_CASE("builder postconditions on generated platforms") {
  const AccuracyThreshold t;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    for (Observability o : {Observability::all_nodes, Observability::hosts_only}) {
      MeasurementSet ms = generated_measurements(seed, o);
      for (Builder b : all_builders()) {
        CAPTURE(seed);
        CAPTURE(to_string(b));
        Model m = build(b, ms, t);
        REQUIRE_NOTHROW(validate(m));
        check_labels_are_measured(m, ms);
        CHECK(m.hosts == ms.hosts);
        if (b == Builder::treelat || b == Builder::treebw) CHECK(m.graph.link_count() == ms.host_count() - 1);
        if (b == Builder::imptreelat || b == Builder::imptreebw || b == Builder::aggregate)
          CHECK(count_over_predicted(m, ms, t) == 0);
        if (b == Builder::aggregate)
          for (std::size_t i = 0; i < ms.host_count(); ++i)
            for (std::size_t j = i + 1; j < ms.host_count(); ++j)
              REQUIRE(t.accurate(predict(m, Quantity::latency, i, j), ms.lat.at(i, j)));
        CHECK(model_to_json(build(b, ms, t)).dump() == model_to_json(m).dump());
      }
    }
  }
}

TEST_CASE("improve progress stays within the number of pairs") {
  const AccuracyThreshold t;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    MeasurementSet ms = generated_measurements(seed, Observability::hosts_only);
    const std::size_t pairs = ms.host_count() * (ms.host_count() - 1) / 2;
    for (Model base : {build_tree_lat(ms), build_tree_bw(ms)}) {
      ImproveStats stats;
      improve(base, ms, t, &stats);
      CHECK(stats.iterations <= count_over_predicted(base, ms, t));
      CHECK(stats.iterations <= pairs);
      CHECK(stats.edges_added <= stats.iterations);
    }
  }
}

TEST_CASE("model files round trip and are validated") {
  MeasurementSet ms = generated_measurements(3, Observability::all_nodes);
  Model m = build(Builder::imptreebw, ms, AccuracyThreshold{});
  auto dir = std::filesystem::temp_directory_path() / "netrecon_test_reconstruct";
  save_model(m, dir / "m.json");
  Model back = load_model(dir / "m.json");
  CHECK(model_to_json(back).dump() == model_to_json(m).dump());
  CHECK(back.builder == "imptreebw");

  Json doc = model_to_json(m);
  doc["routes"].erase(doc["routes"].begin());
  CHECK_THROWS_WITH_AS(model_from_json(doc), doctest::Contains("missing route"), Error);
}

TEST_CASE("builder tags and thresholds") {
  CHECK(parse_builder("imptreebw") == Builder::imptreebw);
  CHECK(to_string(Builder::aggregate) == "aggregate");
  CHECK_THROWS_AS(parse_builder("mst"), Error);
  CHECK_THROWS_AS(AccuracyThreshold(0.9), Error);
  CHECK(AccuracyThreshold{}.over_predicted(1.11, 1.0));
  CHECK_FALSE(AccuracyThreshold{}.over_predicted(1.1, 1.0));
  CHECK_THROWS_AS(build_aggregate(make_measurements({"a", "b"}, {1}, {1}), AccuracyThreshold{}, 0.5), Error);
}
