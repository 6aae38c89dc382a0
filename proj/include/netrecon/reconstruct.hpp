#pragma once

// Model builders working only from a MeasurementSet: Clique, TreeLat,
// TreeBW, the Improving procedure and Aggregate.

#include <string>
#include <vector>

#include "netrecon/measure.hpp"
#include "netrecon/model.hpp"

namespace netrecon {

/// A prediction x is accurate for a measurement y when
/// max(x/y, y/x) <= ratio.
struct AccuracyThreshold {
  double ratio = 1.10;

  explicit AccuracyThreshold(double r = 1.10);
  bool accurate(double predicted, double measured) const;
  bool over_predicted(double predicted, double measured) const { return predicted > ratio * measured; }
};

Model build_clique(const MeasurementSet& ms);

/// Kruskal on measured latencies (ascending) / bandwidths (descending); ties
/// go to the lexicographically smaller host pair. Routes are tree paths.
Model build_tree_lat(const MeasurementSet& ms);
Model build_tree_bw(const MeasurementSet& ms);

struct ImproveStats {
  std::size_t iterations = 0;
  std::size_t edges_added = 0;
  std::size_t reroutes = 0;
};

/// Adds direct edges until no host pair has its latency over-predicted.
/// Each round connects the over-predicted pair with the smallest measured
/// latency, then reroutes every still over-predicted pair through the new
/// edge when that brings its prediction strictly closer to the measurement.
/// The builder tag becomes "imp" + the input tag.
Model improve(Model m, const MeasurementSet& ms, const AccuracyThreshold& t, ImproveStats* stats = nullptr);

/// Grows a connected set from the closest pair of hosts, attaching the host
/// nearest to the set with the edges that make the most of its routes
/// accurate, tracking inaccurate routes and repairing them at the end.
Model build_aggregate(const MeasurementSet& ms, const AccuracyThreshold& t, double slack = 1.5);

enum class Builder { clique, treelat, treebw, imptreelat, imptreebw, aggregate };

Builder parse_builder(std::string_view text);
std::string_view to_string(Builder b);
const std::vector<Builder>& all_builders();

Model build(Builder b, const MeasurementSet& ms, const AccuracyThreshold& t, double slack = 1.5);

}  // namespace netrecon
