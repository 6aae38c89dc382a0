#pragma once

// Flow-level network simulation under max-min fair bandwidth sharing.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "netrecon/kernels.hpp"
#include "netrecon/platform.hpp"

namespace netrecon {

/// Rate (MB/s) of each flow, in input order.
struct FlowAllocation {
  std::vector<double> rates;
};

/// Progressive filling: the link with the smallest remaining capacity per
/// unfrozen flow is saturated first (ties go to the lowest link index), its
/// flows are frozen at that share, and the process repeats. Every flow must
/// cross at least one link.
FlowAllocation maxmin_allocate(std::span<const double> capacities,
                               std::span<const std::vector<LinkIndex>> flows);
FlowAllocation maxmin_allocate(const Platform& p, std::span<const Route> flows);

/// Returns an empty string when `alloc` is feasible and max-min optimal
/// (every flow crosses a saturated link on which it has the largest rate),
/// otherwise a description of the first violation.
std::string check_allocation(std::span<const double> capacities,
                             std::span<const std::vector<LinkIndex>> flows,
                             const FlowAllocation& alloc, double rel_tol = 1e-9);

using RouteFn = std::function<Route(NodeIndex src, NodeIndex dst)>;

struct SimulationResult {
  double makespan_ms = 0.0;
  std::vector<double> start_ms;      // when dependencies were satisfied
  std::vector<double> finish_ms;
  std::vector<double> delivered_mb;  // integral of the allocated rate
};

/// Event-driven run of `trace` on `graph`. A transfer starts once all its
/// dependencies are done, spends one route latency before sending, then
/// shares bandwidth with the other sending transfers; rates are recomputed
/// whenever a transfer starts or stops sending. Simultaneous events are
/// handled in transfer id order. Times are in ms, sizes in MB, rates in MB/s.
SimulationResult simulate(const Platform& graph, const RouteFn& routes, const AppTrace& trace);

/// Convenience overload routing on the platform's own shortest paths.
SimulationResult simulate(const Platform& graph, const PlatformRouting& routing, const AppTrace& trace);

}  // namespace netrecon
