#include "netrecon/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace netrecon {

CampaignConfig default_campaign() {
  CampaignConfig c;
  c.campaign = "desk";
  for (std::uint64_t i = 0; i < 10; ++i) {
    GenParams g;
    g.n_hosts = 30;
    g.n_backbone_routers = 16;
    g.clusters = 8;
    g.extra_backbone_edges = 2;
    g.seed = 1 + i;
    c.generated.push_back(g);
  }
  return c;
}

void validate(const CampaignConfig& config) {
  if (config.generated.empty() && config.platform_files.empty()) throw Error("campaign has no platforms");
  if (config.builders.empty()) throw Error("campaign has no builders");
  for (const auto& g : config.generated) validate(g);
  for (const auto& f : config.platform_files)
    if (!std::filesystem::exists(f)) throw Error("platform file not found: " + f.string());
  AccuracyThreshold check(config.threshold);
  if (!(config.slack >= 1.0)) throw Error("slack must be >= 1");
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) throw Error("epsilon must lie in (0, 1)");
}

CampaignConfig campaign_from_json(const Json& doc, const std::filesystem::path& base_dir) {
  require_fields(doc,
                 {"campaign", "generate", "platform_files", "observability", "builders", "kernels", "kernel_params",
                  "threshold", "slack", "epsilon", "seed", "sampling", "interference", "output", "jobs"},
                 "campaign");
  CampaignConfig c;
  c.generated.clear();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  try {
    c.campaign = doc.value("campaign", c.campaign);
    if (doc.contains("generate")) {
      const auto& g = doc["generate"];
      require_fields(g, {"count", "seed", "params"}, "campaign.generate");
      std::size_t count = g.value("count", std::size_t{1});
      std::uint64_t first = g.value("seed", std::uint64_t{1});
      GenParams base = g.contains("params") ? gen_params_from_json(g["params"]) : GenParams{};
      for (std::size_t i = 0; i < count; ++i) {
        GenParams p = base;
        p.seed = first + i;
        c.generated.push_back(p);
      }
    }
    if (doc.contains("platform_files"))
      for (const auto& f : doc["platform_files"].get<std::vector<std::string>>()) c.platform_files.push_back(resolve(f));
    if (doc.contains("observability")) c.observability = parse_observability(doc["observability"].get<std::string>());
    if (doc.contains("builders")) {
      c.builders.clear();
      for (const auto& b : doc["builders"].get<std::vector<std::string>>()) c.builders.push_back(parse_builder(b));
    }
    if (doc.contains("kernels")) {
      c.kernels.clear();
      for (const auto& k : doc["kernels"].get<std::vector<std::string>>()) c.kernels.push_back(parse_kernel(k));
    }
    if (doc.contains("kernel_params")) c.kernel_params = kernel_params_from_json(doc["kernel_params"]);
    c.threshold = doc.value("threshold", c.threshold);
    c.slack = doc.value("slack", c.slack);
    c.epsilon = doc.value("epsilon", c.epsilon);
    c.seed = doc.value("seed", c.seed);
    if (doc.contains("sampling")) {
      const auto& s = doc["sampling"];
      require_fields(s, {"mode", "k", "seed"}, "campaign.sampling");
      std::string mode = s.value("mode", "all");
      if (mode == "all") c.sampling = Sampling::all();
      else if (mode == "random") c.sampling = Sampling::random(s.at("k").get<std::size_t>(), s.value("seed", c.seed));
      else throw Error("campaign.sampling: mode must be all or random");
    }
    c.interference = doc.value("interference", c.interference);
    if (doc.contains("output")) c.output = resolve(doc["output"].get<std::string>());
    c.jobs = doc.value("jobs", c.jobs);
  } catch (const Json::exception& e) {
    throw Error(std::string("campaign: ") + e.what());
  }
  return c;
}

CampaignConfig load_campaign(const std::filesystem::path& path) {
  CampaignConfig c = campaign_from_json(read_json_file(path), path.parent_path());
  validate(c);
  return c;
}

const CellResult& CampaignResult::cell(const std::string& platform, Builder b) const {
  for (const auto& c : cells)
    if (c.platform == platform && c.builder == b) return c;
  throw Error("no result for " + platform + " / " + std::string(to_string(b)));
}

std::vector<std::string> CampaignResult::platforms() const {
  std::vector<std::string> names;
  for (const auto& c : cells)
    if (names.empty() || names.back() != c.platform) names.push_back(c.platform);
  return names;
}

namespace {

struct PlatformJob {
  std::string name;
  std::optional<GenParams> params;
  std::filesystem::path file;
};

std::vector<CellResult> run_platform(const CampaignConfig& config, const PlatformJob& job) {
  Platform p = job.params ? generate(*job.params) : load_platform(job.file);
  auto hosts = observable_hosts(p, config.observability);
  MeasurementSet ms = measure_end_to_end(p, hosts);
  if (config.interference) {
    Sampling sampling = config.sampling.value_or(Sampling::default_for(hosts.size(), config.seed));
    add_interference(p, ms, sampling);
  }
  if (!config.output.empty()) {
    save_platform(p, config.output / "platforms" / (p.name() + ".json"));
    store(ms, config.output / "measurements" / (p.name() + ".json"));
  }

  const AccuracyThreshold threshold(config.threshold);
  std::vector<CellResult> cells;
  for (Builder b : config.builders) {
    Model m = build(b, ms, threshold, config.slack);
    m.builder = std::string(to_string(b));
    CellResult cell;
    cell.platform = p.name();
    cell.builder = b;
    cell.model_edges = m.graph.link_count();
    cell.latency = end_to_end_report(m, ms, Quantity::latency);
    cell.bandwidth = end_to_end_report(m, ms, Quantity::bandwidth);
    if (config.interference) cell.interference = interference_report(p, m, ms, config.epsilon);
    for (Kernel k : config.kernels)
      cell.applicative[k] = applicative_report(p, m, k, config.kernel_params, config.seed);
    if (!config.output.empty())
      save_model(m, config.output / "models" / p.name() / (std::string(to_string(b)) + ".json"));
    cells.push_back(std::move(cell));
  }
  return cells;
}

AccuracyReport applicative_accuracy(Kernel k, const ApplicativeResult& r) {
  return summarize("app:" + std::string(to_string(k)), {{r.model_ms, r.original_ms}});
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& config) {
  validate(config);
  std::vector<PlatformJob> jobs;
  for (const auto& g : config.generated) jobs.push_back({"gen-" + std::to_string(g.seed), g, {}});
  for (const auto& f : config.platform_files) jobs.push_back({f.string(), std::nullopt, f});
  std::set<std::string> seen_seeds;
  for (const auto& j : jobs)
    if (j.params && !seen_seeds.insert(j.name).second) throw Error("campaign generates " + j.name + " twice");

  std::vector<std::vector<CellResult>> per_platform(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        per_platform[i] = run_platform(config, jobs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t n_threads = std::clamp<std::size_t>(config.jobs, 1, std::max<std::size_t>(1, jobs.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  CampaignResult result;
  std::set<std::string> names;
  for (auto& cells : per_platform) {
    for (auto& c : cells) {
      if (c.builder == cells.front().builder && !names.insert(c.platform).second)
        throw Error("duplicate platform name " + c.platform);
      result.cells.push_back(std::move(c));
    }
  }
  std::stable_sort(result.cells.begin(), result.cells.end(), [](const CellResult& x, const CellResult& y) {
    if (x.platform != y.platform) return x.platform < y.platform;
    return to_string(x.builder) < to_string(y.builder);
  });

  const std::string obs(to_string(config.observability));
  for (const auto& c : result.cells) {
    const std::string tag(to_string(c.builder));
    result.rows.push_back({config.campaign, c.platform, obs, tag, "latency", c.latency, std::nullopt});
    result.rows.push_back({config.campaign, c.platform, obs, tag, "bandwidth", c.bandwidth, std::nullopt});
    if (c.interference)
      result.rows.push_back({config.campaign, c.platform, obs, tag, "interference", std::nullopt, c.interference});
    for (const auto& [k, r] : c.applicative)
      result.rows.push_back({config.campaign, c.platform, obs, tag, "app:" + std::string(to_string(k)),
                             applicative_accuracy(k, r), std::nullopt});
  }
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const ReportRow& x, const ReportRow& y) {
    return std::tie(x.platform, x.builder, x.metric) < std::tie(y.platform, y.builder, y.metric);
  });

  std::ostringstream csv;
  csv << csv_header() << '\n';
  for (const auto& row : result.rows) csv << csv_line(row) << '\n';
  result.results_csv = csv.str();

  // Aggregates across platforms per (builder, metric): geometric mean of the
  // per-platform values with their extremes.
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const auto& row : result.rows) {
    double v = row.accuracy ? row.accuracy->geo_mean_all : row.interference->accuracy_fraction();
    groups[{row.builder, row.metric}].push_back(v);
  }
  std::ostringstream summary;
  summary << "campaign,observability,builder,metric,platforms,mean,min,max\n";
  for (const auto& [key, values] : groups) {
    bool fraction = key.second == "interference";
    double mean = 0.0;
    if (fraction) {
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
    } else {
      mean = geometric_mean(values);
    }
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    summary << config.campaign << ',' << obs << ',' << key.first << ',' << key.second << ',' << values.size() << ','
            << format_number(mean) << ',' << format_number(*lo) << ',' << format_number(*hi) << '\n';
  }
  result.summary_csv = summary.str();

  if (!config.output.empty()) {
    write_text_file(config.output / "results.csv", result.results_csv);
    write_text_file(config.output / "summary.csv", result.summary_csv);
  }
  return result;
}

}  // namespace netrecon
