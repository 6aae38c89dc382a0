#include "netrecon/measure.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "netrecon/flowsim.hpp"
#include "netrecon/rng.hpp"

namespace netrecon {

std::size_t PairMatrix::offset(std::size_t i, std::size_t j) const {
  if (i == j || i >= n_ || j >= n_) throw Error("pair matrix index out of range");
  if (i > j) std::swap(i, j);
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

std::size_t MeasurementSet::index_of(std::string_view host) const {
  auto it = std::lower_bound(hosts.begin(), hosts.end(), host);
  if (it == hosts.end() || *it != host) throw Error("host not measured: " + std::string(host));
  return static_cast<std::size_t>(it - hosts.begin());
}

void validate(const MeasurementSet& ms) {
  const std::size_t n = ms.hosts.size();
  if (n < 2) throw Error("measurement set needs at least two hosts");
  for (std::size_t i = 1; i < n; ++i) {
    if (ms.hosts[i - 1] == ms.hosts[i]) throw Error("duplicate host " + ms.hosts[i]);
    if (ms.hosts[i - 1] > ms.hosts[i]) throw Error("hosts are not sorted");
  }
  if (ms.lat.size() != n || ms.bw.size() != n) throw Error("matrix size does not match host count");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double l = ms.lat.at(i, j), b = ms.bw.at(i, j);
      if (!std::isfinite(l) || l <= 0.0) throw Error("non-positive latency between " + ms.hosts[i] + " and " + ms.hosts[j]);
      if (!std::isfinite(b) || b <= 0.0) throw Error("non-positive bandwidth between " + ms.hosts[i] + " and " + ms.hosts[j]);
    }
  }
  for (std::size_t k = 0; k < ms.interference.size(); ++k) {
    const auto& r = ms.interference[k];
    std::set<std::size_t> four{r.a1, r.b1, r.a2, r.b2};
    if (four.size() != 4 || *four.rbegin() >= n)
      throw Error("interference[" + std::to_string(k) + "]: hosts must be four distinct measured hosts");
    if (!(r.bw1 > 0.0) || !(r.bw2 > 0.0))
      throw Error("interference[" + std::to_string(k) + "]: non-positive rate");
  }
}

MeasurementSet measure_end_to_end(const Platform& p, std::vector<std::string> hosts) {
  std::sort(hosts.begin(), hosts.end());
  if (std::adjacent_find(hosts.begin(), hosts.end()) != hosts.end()) throw Error("duplicate host in measurement list");
  if (hosts.size() < 2) throw Error("need at least two hosts to measure");
  std::vector<NodeIndex> idx;
  for (const auto& h : hosts) idx.push_back(p.node_index(h));
  PlatformRouting routing(p);
  MeasurementSet ms{hosts, PairMatrix(hosts.size()), PairMatrix(hosts.size()), {}, p.name()};
  for (std::size_t i = 0; i < hosts.size(); ++i) {
    for (std::size_t j = i + 1; j < hosts.size(); ++j) {
      const Route& r = routing.canonical(idx[i], idx[j]);
      ms.lat.set(i, j, path_latency(p, r));
      ms.bw.set(i, j, path_bandwidth(p, r));
    }
  }
  return ms;
}

Sampling Sampling::default_for(std::size_t n_hosts, std::uint64_t seed) {
  if (n_hosts <= 30) return all();
  return random(20 * n_hosts * n_hosts, seed);
}

std::uint64_t disjoint_pair_count(std::size_t n) {
  if (n < 4) return 0;
  std::uint64_t m = n;
  return m * (m - 1) * (m - 2) * (m - 3) / 8;
}

namespace {

using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;

Key canonical(std::size_t a1, std::size_t b1, std::size_t a2, std::size_t b2) {
  if (a1 > b1) std::swap(a1, b1);
  if (a2 > b2) std::swap(a2, b2);
  if (std::tie(a2, b2) < std::tie(a1, b1)) {
    std::swap(a1, a2);
    std::swap(b1, b2);
  }
  return {a1, b1, a2, b2};
}

std::vector<Key> all_keys(std::size_t n) {
  std::vector<Key> keys;
  for (std::size_t a1 = 0; a1 < n; ++a1)
    for (std::size_t b1 = a1 + 1; b1 < n; ++b1)
      for (std::size_t a2 = a1 + 1; a2 < n; ++a2)
        for (std::size_t b2 = a2 + 1; b2 < n; ++b2)
          if (a2 != b1 && b2 != b1) keys.emplace_back(a1, b1, a2, b2);
  return keys;
}

}  // namespace

std::vector<InterferenceRecord> select_flow_pairs(std::size_t n, const Sampling& sampling) {
  const std::uint64_t total = disjoint_pair_count(n);
  std::vector<Key> keys;
  if (total == 0) {
    // nothing to sample
  } else if (sampling.mode == Sampling::Mode::all || sampling.k >= total) {
    keys = all_keys(n);
  } else if (sampling.k * 2 >= total) {
    keys = all_keys(n);
    Rng rng(sampling.seed);
    for (std::size_t i = 0; i < sampling.k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(keys.size() - i));
      std::swap(keys[i], keys[j]);
    }
    keys.resize(sampling.k);
  } else {
    Rng rng(sampling.seed);
    std::set<Key> chosen;
    while (chosen.size() < sampling.k) {
      std::size_t h[4];
      for (int i = 0; i < 4; ++i) {
        bool fresh;
        do {
          h[i] = static_cast<std::size_t>(rng.below(n));
          fresh = std::find(h, h + i, h[i]) == h + i;
        } while (!fresh);
      }
      chosen.insert(canonical(h[0], h[1], h[2], h[3]));
    }
    keys.assign(chosen.begin(), chosen.end());
  }
  std::sort(keys.begin(), keys.end());
  std::vector<InterferenceRecord> out;
  out.reserve(keys.size());
  for (const auto& [a1, b1, a2, b2] : keys) out.push_back(InterferenceRecord{a1, b1, a2, b2, 0.0, 0.0});
  return out;
}

std::vector<InterferenceRecord> measure_interference(const Platform& p, const std::vector<std::string>& hosts,
                                                     const Sampling& sampling) {
  std::vector<std::string> sorted = hosts;
  std::sort(sorted.begin(), sorted.end());
  std::vector<NodeIndex> idx;
  for (const auto& h : sorted) idx.push_back(p.node_index(h));
  PlatformRouting routing(p);
  std::vector<double> caps;
  for (const auto& l : p.links()) caps.push_back(l.label.bandwidth_mbps);

  auto records = select_flow_pairs(sorted.size(), sampling);
  std::vector<std::vector<LinkIndex>> flows(2);
  for (auto& r : records) {
    flows[0] = routing.canonical(idx[r.a1], idx[r.b1]).links;
    flows[1] = routing.canonical(idx[r.a2], idx[r.b2]).links;
    auto alloc = maxmin_allocate(caps, flows);
    r.bw1 = alloc.rates[0];
    r.bw2 = alloc.rates[1];
  }
  return records;
}

void add_interference(const Platform& p, MeasurementSet& ms, const Sampling& sampling) {
  ms.interference = measure_interference(p, ms.hosts, sampling);
}

Json measurements_to_json(const MeasurementSet& ms) {
  Json records = Json::array();
  for (const auto& r : ms.interference) {
    records.push_back({{"a1", ms.hosts[r.a1]},
                       {"b1", ms.hosts[r.b1]},
                       {"a2", ms.hosts[r.a2]},
                       {"b2", ms.hosts[r.b2]},
                       {"bw1", r.bw1},
                       {"bw2", r.bw2}});
  }
  return Json{{"units", {{"latency", "ms"}, {"bandwidth", "MB/s"}}},
              {"source_platform", ms.source_platform_name},
              {"hosts", ms.hosts},
              {"lat", ms.lat.upper()},
              {"bw", ms.bw.upper()},
              {"interference", std::move(records)}};
}

namespace {

// Accepts the upper triangle as a flat list, or a full square matrix (list of
// rows) whose off-diagonal entries must be symmetric.
PairMatrix matrix_from_json(const Json& v, std::size_t n, const char* name) {
  PairMatrix m(n);
  if (!v.is_array()) throw Error(std::string(name) + ": expected a list");
  if (!v.empty() && v[0].is_array()) {
    if (v.size() != n) throw Error(std::string(name) + ": expected " + std::to_string(n) + " rows");
    for (std::size_t i = 0; i < n; ++i) {
      if (!v[i].is_array() || v[i].size() != n)
        throw Error(std::string(name) + "[" + std::to_string(i) + "]: expected " + std::to_string(n) + " entries");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!v[i][j].is_number() || !v[j][i].is_number())
          throw Error(std::string(name) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]: not a number");
        double x = v[i][j].get<double>(), y = v[j][i].get<double>();
        if (x != y)
          throw Error(std::string(name) + ": asymmetric matrix at [" + std::to_string(i) + "][" + std::to_string(j) + "]");
        m.set(i, j, x);
      }
    }
    return m;
  }
  if (v.size() != m.upper().size())
    throw Error(std::string(name) + ": expected " + std::to_string(m.upper().size()) + " upper-triangle entries, got " +
                std::to_string(v.size()));
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      if (!v[k].is_number()) throw Error(std::string(name) + "[" + std::to_string(k) + "]: not a number");
      m.set(i, j, v[k].get<double>());
    }
  }
  return m;
}

}  // namespace

MeasurementSet measurements_from_json(const Json& doc) {
  require_fields(doc, {"units", "source_platform", "hosts", "lat", "bw", "interference"}, "measurements");
  if (doc.contains("units")) {
    const auto& u = doc["units"];
    require_fields(u, {"latency", "bandwidth"}, "units");
    if (u.value("latency", "ms") != "ms" || u.value("bandwidth", "MB/s") != "MB/s")
      throw Error("measurements: units must be ms and MB/s");
  }
  MeasurementSet ms;
  try {
    ms.source_platform_name = doc.value("source_platform", "");
    ms.hosts = doc.at("hosts").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw Error(std::string("measurements: ") + e.what());
  }
  if (ms.hosts.empty()) throw Error("measurements: empty host list");
  if (!std::is_sorted(ms.hosts.begin(), ms.hosts.end())) throw Error("measurements: hosts are not sorted");
  if (!doc.contains("lat") || !doc.contains("bw")) throw Error("measurements: missing lat or bw");
  ms.lat = matrix_from_json(doc["lat"], ms.hosts.size(), "lat");
  ms.bw = matrix_from_json(doc["bw"], ms.hosts.size(), "bw");
  if (doc.contains("interference")) {
    std::size_t k = 0;
    for (const auto& r : doc["interference"]) {
      std::string where = "interference[" + std::to_string(k++) + "]";
      require_fields(r, {"a1", "b1", "a2", "b2", "bw1", "bw2"}, where);
      try {
        ms.interference.push_back(InterferenceRecord{
            ms.index_of(r.at("a1").get<std::string>()), ms.index_of(r.at("b1").get<std::string>()),
            ms.index_of(r.at("a2").get<std::string>()), ms.index_of(r.at("b2").get<std::string>()),
            r.at("bw1").get<double>(), r.at("bw2").get<double>()});
      } catch (const Json::exception& e) {
        throw Error(where + ": " + e.what());
      } catch (const Error& e) {
        throw Error(where + ": " + e.what());
      }
    }
  }
  validate(ms);
  return ms;
}

void store(const MeasurementSet& ms, const std::filesystem::path& path) {
  write_json_file(path, measurements_to_json(ms));
}

MeasurementSet load_measurements(const std::filesystem::path& path) {
  try {
    return measurements_from_json(read_json_file(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace netrecon
