#include "netrecon/flowsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace netrecon {

FlowAllocation maxmin_allocate(std::span<const double> capacities,
                               std::span<const std::vector<LinkIndex>> flows) {
  const std::size_t n_links = capacities.size();
  std::vector<std::vector<std::size_t>> on_link(n_links);
  for (std::size_t f = 0; f < flows.size(); ++f) {
    if (flows[f].empty()) throw Error("flow " + std::to_string(f) + " crosses no link");
    for (LinkIndex l : flows[f]) {
      if (l >= n_links) throw Error("flow " + std::to_string(f) + " uses unknown link");
      on_link[l].push_back(f);
    }
  }
  std::vector<double> remaining(capacities.begin(), capacities.end());
  std::vector<std::size_t> active(n_links, 0);
  for (std::size_t l = 0; l < n_links; ++l) active[l] = on_link[l].size();

  FlowAllocation alloc{std::vector<double>(flows.size(), 0.0)};
  std::vector<char> frozen(flows.size(), 0);
  std::size_t unfrozen = flows.size();
  while (unfrozen > 0) {
    std::size_t best = n_links;
    double best_share = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < n_links; ++l) {
      if (active[l] == 0) continue;
      double share = std::max(0.0, remaining[l]) / static_cast<double>(active[l]);
      if (share < best_share) {
        best_share = share;
        best = l;
      }
    }
    for (std::size_t f : on_link[best]) {
      if (frozen[f]) continue;
      frozen[f] = 1;
      --unfrozen;
      alloc.rates[f] = best_share;
      for (LinkIndex l : flows[f]) {
        remaining[l] -= best_share;
        --active[l];
      }
    }
  }
  return alloc;
}

namespace {

std::vector<double> capacities_of(const Platform& p) {
  std::vector<double> caps;
  caps.reserve(p.link_count());
  for (const auto& l : p.links()) caps.push_back(l.label.bandwidth_mbps);
  return caps;
}

}  // namespace

FlowAllocation maxmin_allocate(const Platform& p, std::span<const Route> flows) {
  std::vector<std::vector<LinkIndex>> links;
  links.reserve(flows.size());
  for (const auto& r : flows) links.push_back(r.links);
  auto caps = capacities_of(p);
  return maxmin_allocate(caps, links);
}

std::string check_allocation(std::span<const double> capacities,
                             std::span<const std::vector<LinkIndex>> flows,
                             const FlowAllocation& alloc, double rel_tol) {
  std::ostringstream why;
  if (alloc.rates.size() != flows.size()) return "rate count does not match flow count";
  std::vector<double> load(capacities.size(), 0.0);
  std::vector<double> top(capacities.size(), 0.0);
  for (std::size_t f = 0; f < flows.size(); ++f) {
    double r = alloc.rates[f];
    if (!(r > 0.0)) {
      why << "flow " << f << " has non-positive rate " << r;
      return why.str();
    }
    for (LinkIndex l : flows[f]) {
      load[l] += r;
      top[l] = std::max(top[l], r);
    }
  }
  for (std::size_t l = 0; l < capacities.size(); ++l) {
    if (load[l] > capacities[l] * (1.0 + rel_tol)) {
      why << "link " << l << " carries " << load[l] << " over capacity " << capacities[l];
      return why.str();
    }
  }
  for (std::size_t f = 0; f < flows.size(); ++f) {
    double r = alloc.rates[f];
    bool bottlenecked = std::any_of(flows[f].begin(), flows[f].end(), [&](LinkIndex l) {
      return load[l] >= capacities[l] * (1.0 - rel_tol) && r >= top[l] * (1.0 - rel_tol);
    });
    if (!bottlenecked) {
      why << "flow " << f << " has no bottleneck link";
      return why.str();
    }
  }
  return {};
}

SimulationResult simulate(const Platform& graph, const RouteFn& routes, const AppTrace& trace) {
  validate(trace);
  const auto& ts = trace.transfers;
  const std::size_t n = ts.size();
  SimulationResult result;
  result.start_ms.assign(n, 0.0);
  result.finish_ms.assign(n, 0.0);
  result.delivered_mb.assign(n, 0.0);
  if (n == 0) return result;

  std::vector<std::size_t> waiting_on(n, 0);
  std::vector<std::vector<std::size_t>> dependents(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> deps = ts[i].deps;
    std::sort(deps.begin(), deps.end());
    deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
    waiting_on[i] = deps.size();
    for (std::size_t d : deps) dependents[d].push_back(i);
  }

  const auto caps = capacities_of(graph);
  std::vector<std::vector<LinkIndex>> links(n);
  std::vector<double> latency(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Route r = routes(graph.node_index(ts[i].src), graph.node_index(ts[i].dst));
    latency[i] = path_latency(graph, r);
    links[i] = std::move(r.links);
  }

  enum class Phase { waiting, latency, sending, done };
  std::vector<Phase> phase(n, Phase::waiting);
  std::vector<double> send_at(n, 0.0);
  std::vector<double> remaining(n, 0.0);
  std::vector<double> rate(n, 0.0);
  std::vector<std::size_t> sending;

  double now = 0.0;
  auto start = [&](std::size_t i) {
    phase[i] = Phase::latency;
    result.start_ms[i] = now;
    send_at[i] = now + latency[i];
  };
  for (std::size_t i = 0; i < n; ++i)
    if (waiting_on[i] == 0) start(i);

  auto reallocate = [&] {
    std::vector<std::vector<LinkIndex>> flows;
    flows.reserve(sending.size());
    for (std::size_t i : sending) flows.push_back(links[i]);
    FlowAllocation alloc = maxmin_allocate(caps, flows);
    for (std::size_t k = 0; k < sending.size(); ++k) rate[sending[k]] = alloc.rates[k];
  };

  std::size_t finished = 0;
  std::vector<std::size_t> completed;
  while (finished < n) {
    // Rates are in MB/s and times in ms.
    double next = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      if (phase[i] == Phase::latency) next = std::min(next, send_at[i]);
    for (std::size_t i : sending) next = std::min(next, now + remaining[i] / rate[i] * 1000.0);
    if (!std::isfinite(next)) throw Error("simulation stalled with unfinished transfers");

    const double dt = next - now;
    now = next;
    completed.clear();
    const double slack = 1e-12 * std::max(1.0, now);
    std::vector<std::size_t> still_sending;
    for (std::size_t i : sending) {
      double moved = rate[i] * dt / 1000.0;
      result.delivered_mb[i] += moved;
      remaining[i] -= moved;
      if (remaining[i] <= 1e-12 * ts[i].size_mb || now + remaining[i] / rate[i] * 1000.0 <= now + slack) {
        remaining[i] = 0.0;
        phase[i] = Phase::done;
        result.finish_ms[i] = now;
        completed.push_back(i);
      } else {
        still_sending.push_back(i);
      }
    }
    sending = std::move(still_sending);
    for (std::size_t i = 0; i < n; ++i) {
      if (phase[i] != Phase::latency || send_at[i] > now + slack) continue;
      if (ts[i].size_mb == 0.0) {
        phase[i] = Phase::done;
        result.finish_ms[i] = now;
        completed.push_back(i);
      } else {
        phase[i] = Phase::sending;
        remaining[i] = ts[i].size_mb;
        sending.push_back(i);
      }
    }
    std::sort(completed.begin(), completed.end());
    for (std::size_t i : completed) {
      ++finished;
      for (std::size_t d : dependents[i])
        if (--waiting_on[d] == 0) start(d);
    }
    std::sort(sending.begin(), sending.end());
    if (!sending.empty()) reallocate();
  }
  result.makespan_ms = *std::max_element(result.finish_ms.begin(), result.finish_ms.end());
  return result;
}

SimulationResult simulate(const Platform& graph, const PlatformRouting& routing, const AppTrace& trace) {
  return simulate(graph, [&](NodeIndex s, NodeIndex d) { return routing.route(s, d); }, trace);
}

}  // namespace netrecon
