#include <set>
#include <sstream>

#include "doctest.h"
#include "netrecon/evaluate.hpp"
#include "netrecon/platgen.hpp"
#include "netrecon/reconstruct.hpp"
#include "support.hpp"

using namespace netrecon;
using namespace netrecon::testing;

namespace {

// Two sites joined by one 10 MB/s WAN link.
Platform dumbbell() {
  return make_platform({"a1", "a2", "a3", "b1", "b2", "b3"},
                       {{"a1", "L", 0.5, 500}, {"a2", "L", 0.6, 400}, {"a3", "L", 0.7, 300}, {"L", "R", 20, 10},
                        {"b1", "R", 0.5, 500}, {"b2", "R", 0.6, 400}, {"b3", "R", 0.7, 300}},
                       {"L", "R"}, "dumbbell");
}

const InterferenceRecord* find_record(const MeasurementSet& ms, std::set<std::string> f1, std::set<std::string> f2) {
  for (const auto& r : ms.interference) {
    std::set<std::string> g1{ms.hosts[r.a1], ms.hosts[r.b1]}, g2{ms.hosts[r.a2], ms.hosts[r.b2]};
    if ((g1 == f1 && g2 == f2) || (g1 == f2 && g2 == f1)) return &r;
  }
  return nullptr;
}

InterferenceReport report_for_record(const Platform& p, const Model& m, const MeasurementSet& ms,
                                     const InterferenceRecord& r) {
  MeasurementSet one = ms;
  one.interference = {r};
  return interference_report(p, m, one);
}

}  // namespace

TEST_CASE("accuracy is the larger of the two ratios") {
  CHECK(accuracy(1.0, 1.0) == 1.0);
  CHECK(accuracy(2.0, 1.0) == 2.0);
  CHECK(accuracy(0.5, 1.0) == 2.0);
  CHECK_THROWS_AS(accuracy(0.0, 1.0), Error);
  CHECK_THROWS_AS(accuracy(1.0, -2.0), Error);
}

TEST_CASE("summaries use geometric means") {
  CHECK(geometric_mean({}) == 1.0);
  auto r = summarize("latency", {{1.0, 1.0}, {4.0, 1.0}});
  CHECK(r.geo_mean_all == doctest::Approx(2.0));
  CHECK(r.count_exact == 1);
  CHECK(r.count_over == 1);
  CHECK(r.geo_mean_over == doctest::Approx(4.0));
  CHECK(r.geo_mean_under == 1.0);
  CHECK(r.min == 1.0);
  CHECK(r.max == 4.0);

  auto under = summarize("bandwidth", {{1.0, 2.0}, {1.0, 8.0}});
  CHECK(under.count_under == 2);
  CHECK(under.geo_mean_under == doctest::Approx(4.0));
  CHECK(under.geo_mean_all == doctest::Approx(4.0));
}

TEST_CASE("end-to-end reports") {
  GenParams g;
  g.n_hosts = 12;
  g.n_backbone_routers = 5;
  g.clusters = 4;
  g.seed = 3;
  Platform p = generate(g);
  MeasurementSet ms = measure_end_to_end(p, observable_hosts(p, Observability::hosts_only));
  for (Quantity q : {Quantity::latency, Quantity::bandwidth}) {
    auto r = end_to_end_report(build_clique(ms), ms, q);
    CHECK(r.geo_mean_all == 1.0);
    CHECK(r.count_exact == r.total());
    CHECK(end_to_end_report(exact_model(p, Observability::hosts_only), ms, q).geo_mean_all == 1.0);
  }
  auto improved = end_to_end_report(build(Builder::imptreelat, ms, AccuracyThreshold{}), ms, Quantity::latency);
  CHECK(improved.geo_mean_over <= 1.10);
}

TEST_CASE("interference predicted by shared model edges") {
  auto star = make_platform({"A", "B", "C", "D", "H"},
                            {{"A", "H", 1, 100}, {"B", "H", 2, 100}, {"C", "H", 3, 100}, {"D", "H", 4, 100}});
  MeasurementSet ms = measure_end_to_end(star, {"A", "B", "C", "D", "H"});
  Model tree = build_tree_lat(ms);
  auto A = tree.host_index("A"), B = tree.host_index("B"), C = tree.host_index("C"), D = tree.host_index("D");
  CHECK_FALSE(predicts_interference(tree, {A, B}, {C, D}));
  CHECK(predicts_interference(tree, {A, B}, {A, C}));
  Model clique = build_clique(ms);
  CHECK_FALSE(predicts_interference(clique, {A, B}, {C, D}));
}

TEST_CASE("interference report classifies records") {
  SUBCASE("exact copy scores every record correctly") {
    Platform p = dumbbell();
    for (Observability o : {Observability::all_nodes, Observability::hosts_only}) {
      MeasurementSet ms = measure_end_to_end(p, observable_hosts(p, o));
      add_interference(p, ms, Sampling::all());
      auto r = interference_report(p, exact_model(p, o), ms);
      CHECK(r.total == ms.interference.size());
      CHECK(r.accuracy_fraction() == 1.0);
    }
  }
  SUBCASE("clique misses a shared bottleneck") {
    Platform p = dumbbell();
    MeasurementSet ms = measure_end_to_end(p, observable_hosts(p, Observability::hosts_only));
    add_interference(p, ms, Sampling::all());
    const InterferenceRecord* rec = find_record(ms, {"a1", "b1"}, {"a2", "b2"});
    REQUIRE(rec != nullptr);
    auto r = report_for_record(p, build_clique(ms), ms, *rec);
    CHECK(r.false_negative == 1);
    CHECK(r.false_positive_fraction() == 0.0);
  }
  SUBCASE("a chain model invents sharing between disjoint flows") {
    auto p = make_platform({"A", "B", "C", "D"}, {{"A", "X", 1, 100}, {"B", "X", 1, 100}, {"C", "X", 1, 100}, {"D", "X", 1, 100}},
                           {"X"});
    // Latencies that make the spanning tree the chain A-B-C-D.
    MeasurementSet ms = make_measurements({"A", "B", "C", "D"}, {1, 2, 3, 1, 2, 1}, {100, 100, 100, 100, 100, 100});
    ms.interference = measure_interference(p, ms.hosts, Sampling::all());
    Model chain = build_tree_lat(ms);
    const InterferenceRecord* rec = find_record(ms, {"A", "C"}, {"B", "D"});
    REQUIRE(rec != nullptr);
    auto r = report_for_record(p, chain, ms, *rec);
    CHECK(r.false_positive == 1);
    CHECK(r.false_positive_fraction() == 1.0);
  }
  CHECK_THROWS_AS(interference_report(dumbbell(), build_clique(measure_end_to_end(dumbbell(), {"a1", "b1"})),
                                      measure_end_to_end(dumbbell(), {"a1", "b1"}), 1.5),
                  Error);
}

TEST_CASE("applicative reports") {
  Platform p = dumbbell();
  const KernelParams params;
  for (Observability o : {Observability::all_nodes, Observability::hosts_only})
    for (Kernel k : {Kernel::token, Kernel::broadcast, Kernel::all2all, Kernel::pmm})
      CHECK(applicative_report(p, exact_model(p, o), k, params, 5).ratio == 1.0);

  MeasurementSet ms = measure_end_to_end(p, observable_hosts(p, Observability::hosts_only));
  Model clique = build_clique(ms);
  CHECK(applicative_report(p, clique, Kernel::token, params, 5).ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(applicative_report(p, clique, Kernel::broadcast, params, 5).ratio == doctest::Approx(1.0).epsilon(1e-12));

  auto clique_a2a = applicative_report(p, clique, Kernel::all2all, params, 5);
  auto tree_a2a = applicative_report(p, build(Builder::imptreebw, ms, AccuracyThreshold{}), Kernel::all2all, params, 5);
  CHECK(clique_a2a.model_ms < clique_a2a.original_ms);
  CHECK(clique_a2a.ratio > 2.0);
  CHECK(clique_a2a.ratio > tree_a2a.ratio);
}

TEST_CASE("CSV rows") {
  std::string header = csv_header();
  CHECK(header.rfind("campaign,platform,observability,builder,metric,", 0) == 0);
  ReportRow acc{"c", "p", "all", "clique", "latency", summarize("latency", {{2.0, 1.0}}), std::nullopt};
  std::string line = csv_line(acc);
  CHECK(line.rfind("c,p,all,clique,latency,2,2,1,2,2,1,0,0,", 0) == 0);
  InterferenceReport ir{4, 3, 1, 0};
  std::string iline = csv_line({"c", "p", "hosts", "treebw", "interference", std::nullopt, ir});
  CHECK(iline.find(",3,1,0,0.75") != std::string::npos);
  auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  CHECK(count(line) == count(header));
  CHECK(count(iline) == count(header));
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
}
