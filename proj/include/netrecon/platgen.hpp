#pragma once

// Synthetic Internet-like platforms (two-level backbone + clusters) and
// platform files.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "netrecon/platform.hpp"
#include "netrecon/platform_io.hpp"

namespace netrecon {

struct Range {
  double min = 0.0;
  double max = 0.0;
};

struct GenParams {
  std::size_t n_hosts = 60;
  std::size_t n_backbone_routers = 10;
  std::size_t clusters = 6;
  Range wan_latency{5.0, 150.0};
  Range lan_latency{0.1, 1.0};
  Range wan_bw{10.0, 100.0};
  Range lan_bw{100.0, 1000.0};
  std::size_t extra_backbone_edges = 2;
  std::uint64_t seed = 1;
};

/// Throws a descriptive Error when a count is zero or a range is empty or
/// non-positive.
void validate(const GenParams& params);

/// Backbone: random recursive tree over routers r0..rR-1 (router i attaches
/// to a uniformly drawn earlier router), then `extra_backbone_edges` distinct
/// extra router pairs. Host i joins cluster i mod `clusters`; cluster c is a
/// star around router c mod R. Labels are uniform in the WAN/LAN ranges.
/// Draw order is fixed: tree, extra edges, then host links in host order.
Platform generate(const GenParams& params);

Json gen_params_to_json(const GenParams& params);
/// Missing fields keep their defaults; unknown fields are rejected.
GenParams gen_params_from_json(const Json& doc);

/// Parses, checks labels and connectivity.
Platform load_platform(const std::filesystem::path& path);
void save_platform(const Platform& p, const std::filesystem::path& path);

enum class Observability { all_nodes, hosts_only };

Observability parse_observability(std::string_view text);
std::string_view to_string(Observability o);

/// Sorted ids of the nodes a measurement process can run on.
std::vector<std::string> observable_hosts(const Platform& p, Observability o);

}  // namespace netrecon
