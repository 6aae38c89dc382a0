#include "netrecon/evaluate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "netrecon/flowsim.hpp"

namespace netrecon {

double accuracy(double reconstructed, double measured) {
  if (!(reconstructed > 0.0) || !(measured > 0.0))
    throw Error("accuracy needs positive values, got " + format_number(reconstructed) + " and " +
                format_number(measured));
  return std::max(reconstructed / measured, measured / reconstructed);
}

double geometric_mean(const std::vector<double>& ratios) {
  if (ratios.empty()) return 1.0;
  double log_sum = 0.0;
  for (double r : ratios) log_sum += std::log(r);
  return std::exp(log_sum / static_cast<double>(ratios.size()));
}

AccuracyReport summarize(std::string metric, const std::vector<std::pair<double, double>>& values) {
  AccuracyReport report;
  report.metric = std::move(metric);
  std::vector<double> all, over, under;
  for (auto [predicted, measured] : values) {
    double acc = accuracy(predicted, measured);
    all.push_back(acc);
    if (std::abs(predicted - measured) <= 1e-9 * measured) {
      ++report.count_exact;
    } else if (predicted > measured) {
      ++report.count_over;
      over.push_back(acc);
    } else {
      ++report.count_under;
      under.push_back(acc);
    }
  }
  report.geo_mean_all = geometric_mean(all);
  report.geo_mean_over = geometric_mean(over);
  report.geo_mean_under = geometric_mean(under);
  if (!all.empty()) {
    auto [lo, hi] = std::minmax_element(all.begin(), all.end());
    report.min = *lo;
    report.max = *hi;
    // exp(mean(log)) can land an ulp outside [min, max].
    report.geo_mean_all = std::clamp(report.geo_mean_all, report.min, report.max);
  }
  return report;
}

AccuracyReport end_to_end_report(const Model& m, const MeasurementSet& ms, Quantity q) {
  std::vector<std::size_t> in_model;
  for (const auto& h : ms.hosts) in_model.push_back(m.host_index(h));
  std::vector<std::pair<double, double>> values;
  for (std::size_t i = 0; i < ms.hosts.size(); ++i) {
    for (std::size_t j = i + 1; j < ms.hosts.size(); ++j) {
      double measured = q == Quantity::latency ? ms.lat.at(i, j) : ms.bw.at(i, j);
      values.emplace_back(predict(m, q, in_model[i], in_model[j]), measured);
    }
  }
  return summarize(q == Quantity::latency ? "latency" : "bandwidth", values);
}

bool predicts_interference(const Model& m, std::pair<std::size_t, std::size_t> flow1,
                           std::pair<std::size_t, std::size_t> flow2) {
  Route r1 = m.route(flow1.first, flow1.second);
  Route r2 = m.route(flow2.first, flow2.second);
  return routes_share_link(m.graph, r1, r2);
}

bool rates_interfere(double bw1, double alone1, double bw2, double alone2, double epsilon) {
  return bw1 < (1.0 - epsilon) * alone1 || bw2 < (1.0 - epsilon) * alone2;
}

InterferenceReport interference_report(const Platform& p, const Model& m, const MeasurementSet& ms,
                                       double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error("epsilon must lie in (0, 1)");
  PlatformRouting routing(p);
  std::vector<NodeIndex> on_platform;
  std::vector<std::size_t> in_model;
  for (const auto& h : ms.hosts) {
    on_platform.push_back(p.node_index(h));
    in_model.push_back(m.host_index(h));
  }
  std::vector<double> caps;
  for (const auto& l : m.graph.links()) caps.push_back(l.label.bandwidth_mbps);

  InterferenceReport report;
  std::vector<std::vector<LinkIndex>> flows(2);
  for (const auto& r : ms.interference) {
    double alone1 = path_bandwidth(p, routing.canonical(on_platform[r.a1], on_platform[r.b1]));
    double alone2 = path_bandwidth(p, routing.canonical(on_platform[r.a2], on_platform[r.b2]));
    bool actual = rates_interfere(r.bw1, alone1, r.bw2, alone2, epsilon);

    Route m1 = m.route(in_model[r.a1], in_model[r.b1]);
    Route m2 = m.route(in_model[r.a2], in_model[r.b2]);
    flows[0] = m1.links;
    flows[1] = m2.links;
    auto alloc = maxmin_allocate(caps, flows);
    bool predicted = rates_interfere(alloc.rates[0], path_bandwidth(m.graph, m1), alloc.rates[1],
                                     path_bandwidth(m.graph, m2), epsilon);
    ++report.total;
    if (predicted == actual) ++report.correct;
    else if (predicted) ++report.false_positive;
    else ++report.false_negative;
  }
  return report;
}

ApplicativeResult applicative_report(const Platform& p, const Model& m, Kernel kernel, const KernelParams& params,
                                     std::uint64_t seed) {
  AppTrace trace = make_trace(kernel, m.hosts, params, seed);
  PlatformRouting routing(p);
  SimulationResult original = simulate(p, routing, trace);

  std::vector<std::size_t> host_of(m.graph.node_count(), m.hosts.size());
  for (std::size_t i = 0; i < m.hosts.size(); ++i) host_of[m.host_nodes[i]] = i;
  SimulationResult predicted = simulate(
      m.graph, [&](NodeIndex s, NodeIndex d) { return m.route(host_of.at(s), host_of.at(d)); }, trace);

  ApplicativeResult out{original.makespan_ms, predicted.makespan_ms, 1.0};
  if (out.original_ms > 0.0 || out.model_ms > 0.0) out.ratio = accuracy(out.model_ms, out.original_ms);
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_header() {
  return "campaign,platform,observability,builder,metric,geo_mean_all,geo_mean_over,geo_mean_under,min,max,"
         "count_over,count_under,count_exact,correct,false_positive,false_negative,accuracy_fraction";
}

std::string csv_line(const ReportRow& row) {
  std::ostringstream out;
  out << row.campaign << ',' << row.platform << ',' << row.observability << ',' << row.builder << ','
      << row.metric << ',';
  if (row.accuracy) {
    const auto& a = *row.accuracy;
    out << format_number(a.geo_mean_all) << ',' << format_number(a.geo_mean_over) << ','
        << format_number(a.geo_mean_under) << ',' << format_number(a.min) << ',' << format_number(a.max) << ','
        << a.count_over << ',' << a.count_under << ',' << a.count_exact << ',';
  } else {
    out << ",,,,,,,,";
  }
  if (row.interference) {
    const auto& i = *row.interference;
    out << i.correct << ',' << i.false_positive << ',' << i.false_negative << ','
        << format_number(i.accuracy_fraction());
  } else {
    out << ",,,";
  }
  return out.str();
}

}  // namespace netrecon
