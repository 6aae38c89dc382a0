#pragma once

// Scoring a model against the platform it was reconstructed from.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netrecon/kernels.hpp"
#include "netrecon/measure.hpp"
#include "netrecon/model.hpp"

namespace netrecon {

/// max(x_r / x_m, x_m / x_r); both values must be positive.
double accuracy(double reconstructed, double measured);

/// Geometric mean of accuracy ratios; 1 for an empty set.
double geometric_mean(const std::vector<double>& ratios);

struct AccuracyReport {
  std::string metric;
  double geo_mean_all = 1.0;
  double geo_mean_over = 1.0;
  double geo_mean_under = 1.0;
  std::size_t count_over = 0;
  std::size_t count_under = 0;
  std::size_t count_exact = 0;
  double min = 1.0;
  double max = 1.0;

  std::size_t total() const { return count_over + count_under + count_exact; }
};

/// Builds a report from (predicted, measured) pairs. A pair is exact when
/// |predicted - measured| <= 1e-9 * measured.
AccuracyReport summarize(std::string metric, const std::vector<std::pair<double, double>>& values);

AccuracyReport end_to_end_report(const Model& m, const MeasurementSet& ms, Quantity q);

/// True when the stored routes of the two host pairs share a model edge.
bool predicts_interference(const Model& m, std::pair<std::size_t, std::size_t> flow1,
                           std::pair<std::size_t, std::size_t> flow2);

struct InterferenceReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;

  double accuracy_fraction() const { return total == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(total); }
  double false_positive_fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(false_positive) / static_cast<double>(total);
  }
};

/// True when either rate dropped below (1 - epsilon) of its standalone rate.
bool rates_interfere(double bw1, double alone1, double bw2, double alone2, double epsilon);

/// Scores each record (measured on `p` between hosts named in `ms`). The
/// platform side interferes when a concurrent rate dropped by more than
/// `epsilon`; the model side is judged the same way, by running the two
/// flows concurrently on the model's stored routes.
InterferenceReport interference_report(const Platform& p, const Model& m, const MeasurementSet& ms,
                                       double epsilon = 0.05);

struct ApplicativeResult {
  double original_ms = 0.0;
  double model_ms = 0.0;
  double ratio = 1.0;
};

/// Simulates the kernel over the model's hosts on the platform (own routing)
/// and on the model (stored routes) with the same trace.
ApplicativeResult applicative_report(const Platform& p, const Model& m, Kernel kernel, const KernelParams& params,
                                     std::uint64_t seed);

/// CSV emission. One fixed header for every row kind; cells that do not
/// apply are left empty.
struct ReportRow {
  std::string campaign;
  std::string platform;
  std::string observability;
  std::string builder;
  std::string metric;
  std::optional<AccuracyReport> accuracy;
  std::optional<InterferenceReport> interference;
};

std::string csv_header();
std::string csv_line(const ReportRow& row);
/// Shortest round-trip decimal representation of a double.
std::string format_number(double v);

}  // namespace netrecon
