#pragma once

// Emulated application-level sensors: end-to-end latency and bandwidth
// between observable hosts, and concurrent rates of flow pairs.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "netrecon/platform.hpp"
#include "netrecon/platform_io.hpp"

namespace netrecon {

/// Dense symmetric matrix without a diagonal, stored as the row-major upper
/// triangle.
class PairMatrix {
 public:
  PairMatrix() = default;
  explicit PairMatrix(std::size_t n) : n_(n), values_(n * (n - (n > 0)) / 2, 0.0) {}

  std::size_t size() const { return n_; }
  double at(std::size_t i, std::size_t j) const { return values_[offset(i, j)]; }
  void set(std::size_t i, std::size_t j, double v) { values_[offset(i, j)] = v; }
  const std::vector<double>& upper() const { return values_; }

  bool operator==(const PairMatrix&) const = default;

 private:
  std::size_t offset(std::size_t i, std::size_t j) const;

  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Two flows between four distinct hosts (indices into MeasurementSet::hosts),
/// with the rate each one achieved while both were running.
struct InterferenceRecord {
  std::size_t a1 = 0, b1 = 0;
  std::size_t a2 = 0, b2 = 0;
  double bw1 = 0.0;
  double bw2 = 0.0;

  bool operator==(const InterferenceRecord&) const = default;
};

struct MeasurementSet {
  std::vector<std::string> hosts;  // sorted, unique
  PairMatrix lat;                  // ms
  PairMatrix bw;                   // MB/s
  std::vector<InterferenceRecord> interference;
  std::string source_platform_name;

  std::size_t host_count() const { return hosts.size(); }
  std::size_t index_of(std::string_view host) const;

  bool operator==(const MeasurementSet&) const = default;
};

/// Throws when a matrix entry is non-positive, hosts are unsorted or
/// repeated, or an interference record is malformed.
void validate(const MeasurementSet& ms);

/// Noise-free latency and bandwidth of the platform route of every pair.
MeasurementSet measure_end_to_end(const Platform& p, std::vector<std::string> hosts);

struct Sampling {
  enum class Mode { all, random } mode = Mode::all;
  std::size_t k = 0;
  std::uint64_t seed = 0;

  static Sampling all() { return {}; }
  static Sampling random(std::size_t k, std::uint64_t seed) { return {Mode::random, k, seed}; }
  /// Exhaustive up to 30 hosts, otherwise 20 n^2 random samples.
  static Sampling default_for(std::size_t n_hosts, std::uint64_t seed);
};

/// Number of unordered pairs of disjoint host pairs among n hosts.
std::uint64_t disjoint_pair_count(std::size_t n);

/// Pairs of disjoint flows in canonical form (a < b inside a flow, flow 1
/// lexicographically before flow 2), sorted. Random sampling draws distinct
/// pairs with a seeded generator; asking for at least as many as exist
/// returns them all.
std::vector<InterferenceRecord> select_flow_pairs(std::size_t n_hosts, const Sampling& sampling);

/// Runs each selected pair of flows concurrently on the platform under
/// max-min sharing and records both rates.
std::vector<InterferenceRecord> measure_interference(const Platform& p, const std::vector<std::string>& hosts,
                                                     const Sampling& sampling);

/// Fills `ms.interference` in place.
void add_interference(const Platform& p, MeasurementSet& ms, const Sampling& sampling);

Json measurements_to_json(const MeasurementSet& ms);
MeasurementSet measurements_from_json(const Json& doc);

void store(const MeasurementSet& ms, const std::filesystem::path& path);
MeasurementSet load_measurements(const std::filesystem::path& path);

}  // namespace netrecon
