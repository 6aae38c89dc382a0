// netrecon: generate platforms, emulate measurements, reconstruct models and
// score them.

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "netrecon/campaign.hpp"
#include "netrecon/evaluate.hpp"
#include "netrecon/measure.hpp"
#include "netrecon/model.hpp"
#include "netrecon/platgen.hpp"
#include "netrecon/reconstruct.hpp"

using namespace netrecon;

namespace {

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") std::cout << text;
  else write_text_file(out, text);
}

std::vector<Kernel> parse_kernels(const std::vector<std::string>& names) {
  std::vector<Kernel> kernels;
  for (const auto& n : names) kernels.push_back(parse_kernel(n));
  return kernels;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconstruct network models from end-to-end measurements and score them"};
  app.require_subcommand(1);

  // generate
  GenParams gen;
  std::string gen_out;
  std::vector<double> wan_lat{gen.wan_latency.min, gen.wan_latency.max}, lan_lat{gen.lan_latency.min, gen.lan_latency.max},
      wan_bw{gen.wan_bw.min, gen.wan_bw.max}, lan_bw{gen.lan_bw.min, gen.lan_bw.max};
  auto* generate_cmd = app.add_subcommand("generate", "Generate a synthetic platform file");
  generate_cmd->add_option("--hosts", gen.n_hosts, "Number of hosts")->capture_default_str();
  generate_cmd->add_option("--routers", gen.n_backbone_routers, "Number of backbone routers")->capture_default_str();
  generate_cmd->add_option("--clusters", gen.clusters, "Number of host clusters")->capture_default_str();
  generate_cmd->add_option("--extra-edges", gen.extra_backbone_edges, "Extra backbone edges beyond the tree")
      ->capture_default_str();
  generate_cmd->add_option("--wan-latency", wan_lat, "WAN latency range in ms")->expected(2);
  generate_cmd->add_option("--lan-latency", lan_lat, "LAN latency range in ms")->expected(2);
  generate_cmd->add_option("--wan-bw", wan_bw, "WAN bandwidth range in MB/s")->expected(2);
  generate_cmd->add_option("--lan-bw", lan_bw, "LAN bandwidth range in MB/s")->expected(2);
  generate_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  generate_cmd->add_option("--out", gen_out, "Output platform file")->required();

  // measure
  std::string measure_platform, measure_out, observability = "all", sampling_mode;
  std::size_t sample_k = 0;
  std::uint64_t measure_seed = 1;
  bool no_interference = false;
  auto* measure_cmd = app.add_subcommand("measure", "Measure a platform between its observable hosts");
  measure_cmd->add_option("platform", measure_platform, "Platform file")->required();
  measure_cmd->add_option("--observability", observability, "all or hosts")->capture_default_str();
  measure_cmd->add_option("--sampling", sampling_mode, "all or random (default: all up to 30 hosts)");
  measure_cmd->add_option("--k", sample_k, "Number of flow pairs for random sampling");
  measure_cmd->add_option("--seed", measure_seed, "Sampling seed")->capture_default_str();
  measure_cmd->add_flag("--no-interference", no_interference, "Skip interference measurements");
  measure_cmd->add_option("--out", measure_out, "Output measurement file")->required();

  // reconstruct
  std::string rec_measurements, rec_builder, rec_out;
  double threshold = 1.10, slack = 1.5, epsilon = 0.05;
  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Build a model from a measurement file");
  reconstruct_cmd->add_option("measurements", rec_measurements, "Measurement file")->required();
  reconstruct_cmd->add_option("--builder", rec_builder, "clique, treelat, treebw, imptreelat, imptreebw, aggregate")
      ->required();
  reconstruct_cmd->add_option("--threshold", threshold, "Accuracy ratio")->capture_default_str();
  reconstruct_cmd->add_option("--slack", slack, "Aggregate edge latency slack")->capture_default_str();
  reconstruct_cmd->add_option("--out", rec_out, "Output model file")->required();

  // evaluate
  std::string eval_platform, eval_model, eval_measurements, eval_out, campaign_name = "adhoc";
  std::vector<std::string> kernel_names{"token", "broadcast", "all2all", "pmm"};
  std::uint64_t eval_seed = 1;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a model against its original platform (CSV)");
  evaluate_cmd->add_option("--platform", eval_platform, "Original platform file")->required();
  evaluate_cmd->add_option("--model", eval_model, "Model file")->required();
  evaluate_cmd->add_option("--measurements", eval_measurements, "Measurement file")->required();
  evaluate_cmd->add_option("--kernels", kernel_names, "Application kernels")->delimiter(',')->capture_default_str();
  evaluate_cmd->add_option("--seed", eval_seed, "Trace seed")->capture_default_str();
  evaluate_cmd->add_option("--epsilon", epsilon, "Interference rate-drop tolerance")->capture_default_str();
  evaluate_cmd->add_option("--campaign", campaign_name, "Campaign id written in each row")->capture_default_str();
  evaluate_cmd->add_option("--out", eval_out, "Output CSV (default: stdout)");

  // pipeline
  std::string config_path, pipe_out, pipe_obs;
  std::optional<std::uint64_t> pipe_seed;
  std::optional<double> pipe_threshold, pipe_slack, pipe_epsilon;
  std::size_t jobs = 0;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run a full campaign from a config file");
  pipeline_cmd->add_option("config", config_path, "Campaign config (JSON)")->required();
  pipeline_cmd->add_option("--out", pipe_out, "Output directory (overrides config)");
  pipeline_cmd->add_option("--seed", pipe_seed, "Trace and sampling seed");
  pipeline_cmd->add_option("--threshold", pipe_threshold, "Accuracy ratio");
  pipeline_cmd->add_option("--slack", pipe_slack, "Aggregate slack");
  pipeline_cmd->add_option("--epsilon", pipe_epsilon, "Interference tolerance");
  pipeline_cmd->add_option("--observability", pipe_obs, "all or hosts");
  pipeline_cmd->add_option("--jobs", jobs, "Worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate_cmd->parsed()) {
      gen.wan_latency = {wan_lat[0], wan_lat[1]};
      gen.lan_latency = {lan_lat[0], lan_lat[1]};
      gen.wan_bw = {wan_bw[0], wan_bw[1]};
      gen.lan_bw = {lan_bw[0], lan_bw[1]};
      if (gen.n_hosts < 2) throw Error("--hosts must be at least 2");
      Platform p = generate(gen);
      save_platform(p, gen_out);
      std::cout << p.name() << ": " << p.node_count() << " nodes, " << p.link_count() << " edges\n";
    } else if (measure_cmd->parsed()) {
      Platform p = load_platform(measure_platform);
      auto hosts = observable_hosts(p, parse_observability(observability));
      MeasurementSet ms = measure_end_to_end(p, hosts);
      if (!no_interference) {
        Sampling s = Sampling::default_for(hosts.size(), measure_seed);
        if (sampling_mode == "all") s = Sampling::all();
        else if (sampling_mode == "random") s = Sampling::random(sample_k ? sample_k : 20 * hosts.size() * hosts.size(), measure_seed);
        else if (!sampling_mode.empty()) throw Error("--sampling must be all or random");
        add_interference(p, ms, s);
      }
      store(ms, measure_out);
      std::cout << p.name() << ": " << ms.host_count() << " hosts, " << ms.interference.size()
                << " interference records\n";
    } else if (reconstruct_cmd->parsed()) {
      Builder b = parse_builder(rec_builder);
      MeasurementSet ms = load_measurements(rec_measurements);
      Model m = build(b, ms, AccuracyThreshold(threshold), slack);
      m.builder = std::string(to_string(b));
      m.graph.set_name(ms.source_platform_name + "-" + m.builder);
      save_model(m, rec_out);
      std::cout << m.builder << ": " << m.graph.node_count() << " nodes, " << m.graph.link_count() << " edges\n";
    } else if (evaluate_cmd->parsed()) {
      Platform p = load_platform(eval_platform);
      Model m = load_model(eval_model);
      MeasurementSet ms = load_measurements(eval_measurements);
      auto kernels = parse_kernels(kernel_names);
      const std::string obs = m.hosts.size() == p.node_count() ? "all" : "hosts";
      std::vector<ReportRow> rows;
      rows.push_back({campaign_name, p.name(), obs, m.builder, "latency", end_to_end_report(m, ms, Quantity::latency), {}});
      rows.push_back({campaign_name, p.name(), obs, m.builder, "bandwidth", end_to_end_report(m, ms, Quantity::bandwidth), {}});
      if (!ms.interference.empty())
        rows.push_back({campaign_name, p.name(), obs, m.builder, "interference", {}, interference_report(p, m, ms, epsilon)});
      for (Kernel k : kernels) {
        auto r = applicative_report(p, m, k, KernelParams{}, eval_seed);
        std::string metric = "app:" + std::string(to_string(k));
        rows.push_back({campaign_name, p.name(), obs, m.builder, metric, summarize(metric, {{r.model_ms, r.original_ms}}), {}});
      }
      std::ostringstream csv;
      csv << csv_header() << '\n';
      for (const auto& row : rows) csv << csv_line(row) << '\n';
      emit(csv.str(), eval_out);
    } else if (pipeline_cmd->parsed()) {
      CampaignConfig config = campaign_from_json(read_json_file(config_path), std::filesystem::path(config_path).parent_path());
      if (!pipe_out.empty()) config.output = pipe_out;
      if (pipe_seed) config.seed = *pipe_seed;
      if (pipe_threshold) config.threshold = *pipe_threshold;
      if (pipe_slack) config.slack = *pipe_slack;
      if (pipe_epsilon) config.epsilon = *pipe_epsilon;
      if (!pipe_obs.empty()) config.observability = parse_observability(pipe_obs);
      if (jobs > 0) config.jobs = jobs;
      CampaignResult result = run_campaign(config);
      if (config.output.empty()) std::cout << result.results_csv;
      else
        std::cout << config.campaign << ": " << result.platforms().size() << " platforms, " << result.rows.size()
                  << " rows written to " << config.output.string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
