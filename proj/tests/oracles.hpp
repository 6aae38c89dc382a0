#pragma once

// Exhaustive reference implementations used to check the production
// algorithms on small instances.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "netrecon/measure.hpp"

namespace netrecon::oracle {

// Sum in ascending order, so equal multisets of weights give identical totals.
inline double canonical_sum(std::vector<double> w) {
  std::sort(w.begin(), w.end());
  double s = 0.0;
  for (double x : w) s += x;
  return s;
}

// Best total weight over all n^(n-2) labeled spanning trees, enumerated
// through their Pruefer codes.
inline double spanning_tree_weight(const PairMatrix& weight, bool minimize) {
  const std::size_t n = weight.size();
  if (n == 2) return weight.at(0, 1);
  std::vector<std::size_t> code(n - 2, 0);
  double best = minimize ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<std::size_t> degree(n, 1);
    for (std::size_t c : code) ++degree[c];
    std::vector<double> w;
    for (std::size_t c : code) {
      std::size_t leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      w.push_back(weight.at(leaf, c));
      --degree[leaf];
      --degree[c];
    }
    std::size_t u = n, v = n;
    for (std::size_t x = 0; x < n; ++x)
      if (degree[x] == 1) (u == n ? u : v) = x;
    w.push_back(weight.at(u, v));
    double total = canonical_sum(w);
    best = minimize ? std::min(best, total) : std::max(best, total);

    std::size_t k = 0;
    while (k < code.size() && ++code[k] == n) code[k++] = 0;
    if (k == code.size()) break;
  }
  return best;
}

// Max-min fair allocation by exhaustive search over a rate grid of step
// 1/`steps_per_unit`, keeping the feasible allocation whose ascending-sorted
// rate vector is lexicographically largest. With integer capacities and at
// most four flows every max-min rate is a multiple of 1/12, so steps_per_unit
// = 12 makes the grid contain the exact answer.
inline std::vector<double> grid_maxmin(const std::vector<std::int64_t>& capacities,
                                       const std::vector<std::vector<std::size_t>>& flows,
                                       std::int64_t steps_per_unit = 12) {
  const std::size_t nf = flows.size();
  std::vector<std::int64_t> remaining;
  for (auto c : capacities) remaining.push_back(c * steps_per_unit);
  std::vector<std::int64_t> rates(nf, 0), best;
  std::vector<std::int64_t> best_sorted;

  std::function<void(std::size_t)> search = [&](std::size_t f) {
    if (f == nf) {
      std::vector<std::int64_t> sorted = rates;
      std::sort(sorted.begin(), sorted.end());
      if (best.empty() || sorted > best_sorted) {
        best = rates;
        best_sorted = std::move(sorted);
      }
      return;
    }
    std::int64_t limit = std::numeric_limits<std::int64_t>::max();
    for (std::size_t l : flows[f]) limit = std::min(limit, remaining[l]);
    // Raising the last flow never lowers the sorted vector, so it takes all
    // that is left.
    for (std::int64_t r = f + 1 == nf ? limit : 0; r <= limit; ++r) {
      for (std::size_t l : flows[f]) remaining[l] -= r;
      rates[f] = r;
      search(f + 1);
      for (std::size_t l : flows[f]) remaining[l] += r;
    }
  };
  search(0);
  std::vector<double> out;
  for (auto r : best) out.push_back(static_cast<double>(r) / static_cast<double>(steps_per_unit));
  return out;
}

}  // namespace netrecon::oracle
