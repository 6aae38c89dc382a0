#pragma once

// Reconstructed network models: a labeled graph plus an explicit route for
// every pair of measured hosts.

#include <filesystem>
#include <string>
#include <vector>

#include "netrecon/platform.hpp"
#include "netrecon/platform_io.hpp"
#include "netrecon/platgen.hpp"

namespace netrecon {

/// One stored path per unordered host pair, kept oriented from the host with
/// the smaller index. Paths hold graph node indices.
class RouteTable {
 public:
  RouteTable() = default;
  explicit RouteTable(std::size_t n_hosts);

  std::size_t host_count() const { return n_; }
  bool has(std::size_t i, std::size_t j) const { return !paths_[offset(i, j)].empty(); }
  /// Path from host min(i,j) to host max(i,j).
  const std::vector<NodeIndex>& canonical(std::size_t i, std::size_t j) const { return paths_[offset(i, j)]; }
  /// Path oriented from host i to host j.
  std::vector<NodeIndex> oriented(std::size_t i, std::size_t j) const;
  /// `path` runs from host i to host j.
  void set(std::size_t i, std::size_t j, std::vector<NodeIndex> path);
  std::size_t routed_pairs() const;

  bool operator==(const RouteTable&) const = default;

 private:
  std::size_t offset(std::size_t i, std::size_t j) const;

  std::size_t n_ = 0;
  std::vector<std::vector<NodeIndex>> paths_;
};

struct Model {
  Platform graph;
  std::vector<std::string> hosts;     // sorted; endpoints covered by `routes`
  std::vector<NodeIndex> host_nodes;  // graph index of each host
  RouteTable routes;
  std::string builder;

  std::size_t host_index(std::string_view id) const;
  Route route(std::size_t i, std::size_t j) const;
};

/// Throws unless every host pair has a simple route in the graph whose
/// endpoints match the pair.
void validate(const Model& m);

enum class Quantity { latency, bandwidth };

double predict(const Model& m, Quantity q, std::size_t i, std::size_t j);
double predict(const Model& m, Quantity q, std::string_view a, std::string_view b);

/// The platform itself, with its own routing, as a model over the hosts
/// visible under `o`. This is the reference every evaluation should score
/// as perfect.
Model exact_model(const Platform& p, Observability o);

/// Platform document plus `builder`, `hosts` and `routes` [{a, b, path}].
Json model_to_json(const Model& m);
Model model_from_json(const Json& doc);
void save_model(const Model& m, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace netrecon
