#pragma once

// Small platform builders shared by the unit tests.

#include <string>
#include <tuple>
#include <vector>

#include "netrecon/measure.hpp"
#include "netrecon/platform.hpp"

namespace netrecon::testing {

struct EdgeSpec {
  std::string a, b;
  double latency_ms;
  double bandwidth_mbps;
};

// Nodes listed in `hosts` are hosts, those in `routers` are routers.
inline Platform make_platform(const std::vector<std::string>& hosts, const std::vector<EdgeSpec>& edges,
                              const std::vector<std::string>& routers = {}, std::string name = "test") {
  Platform p(std::move(name));
  for (const auto& h : hosts) p.add_node(h, NodeKind::host);
  for (const auto& r : routers) p.add_node(r, NodeKind::router);
  for (const auto& e : edges) p.add_link(e.a, e.b, {e.latency_ms, e.bandwidth_mbps});
  return p;
}

// Measurement set built directly from latency and bandwidth lists given in
// upper-triangle order (0,1), (0,2), ..., (1,2), ...
inline MeasurementSet make_measurements(std::vector<std::string> hosts, const std::vector<double>& lat,
                                        const std::vector<double>& bw) {
  MeasurementSet ms;
  ms.hosts = std::move(hosts);
  ms.source_platform_name = "synthetic";
  const std::size_t n = ms.hosts.size();
  ms.lat = PairMatrix(n);
  ms.bw = PairMatrix(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      ms.lat.set(i, j, lat.at(k));
      ms.bw.set(i, j, bw.at(k));
    }
  return ms;
}

inline std::vector<std::string> route_ids(const Platform& p, const Route& r) {
  std::vector<std::string> ids;
  for (NodeIndex n : r.nodes) ids.push_back(p.node(n).id);
  return ids;
}

}  // namespace netrecon::testing
