#pragma once

// Experiment campaigns: platforms x builders x metrics, with CSV output.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netrecon/evaluate.hpp"
#include "netrecon/kernels.hpp"
#include "netrecon/measure.hpp"
#include "netrecon/platgen.hpp"
#include "netrecon/reconstruct.hpp"

namespace netrecon {

struct CampaignConfig {
  std::string campaign = "campaign";
  std::vector<GenParams> generated;
  std::vector<std::filesystem::path> platform_files;
  Observability observability = Observability::all_nodes;
  std::vector<Builder> builders = all_builders();
  std::vector<Kernel> kernels{Kernel::token, Kernel::broadcast, Kernel::all2all, Kernel::pmm};
  KernelParams kernel_params;
  double threshold = 1.10;
  double slack = 1.5;
  double epsilon = 0.05;
  std::uint64_t seed = 1;
  /// Unset: exhaustive up to 30 observable hosts, 20 n^2 samples above.
  std::optional<Sampling> sampling;
  bool interference = true;
  /// Empty: nothing is written.
  std::filesystem::path output;
  std::size_t jobs = 1;
};

/// Desk-scale default: 10 generated platforms of 30 hosts in 8 clusters on a
/// 16-router backbone with 2 extra backbone edges.
CampaignConfig default_campaign();

/// Throws on empty platform or builder lists, missing files or bad
/// thresholds.
void validate(const CampaignConfig& config);

/// Relative paths in the document are resolved against `base_dir`.
CampaignConfig campaign_from_json(const Json& doc, const std::filesystem::path& base_dir = {});
CampaignConfig load_campaign(const std::filesystem::path& path);

struct CellResult {
  std::string platform;
  Builder builder = Builder::clique;
  std::size_t model_edges = 0;
  AccuracyReport latency;
  AccuracyReport bandwidth;
  std::optional<InterferenceReport> interference;
  std::map<Kernel, ApplicativeResult> applicative;
};

struct CampaignResult {
  std::vector<CellResult> cells;  // sorted by (platform, builder tag)
  std::vector<ReportRow> rows;    // sorted by (platform, builder, metric)
  std::string results_csv;
  std::string summary_csv;

  const CellResult& cell(const std::string& platform, Builder b) const;
  std::vector<std::string> platforms() const;
};

/// Runs every (platform, builder) cell. Output bytes do not depend on
/// `jobs`. With a non-empty `output`, writes results.csv, summary.csv and
/// per-platform platform, measurement and model files.
CampaignResult run_campaign(const CampaignConfig& config);

}  // namespace netrecon
