#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "skyde/errors.hpp"
#include "skyde/metrics.hpp"
#include "skyde/scenario.hpp"
#include "skyde/trace_io.hpp"

namespace fs = std::filesystem;
using namespace skyde;

namespace {

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("SKYDE_LOG");
    if (!env) return 0;
    const std::string v(env);
    if (v == "debug") return 2;
    if (v == "info" || v == "1") return 1;
    return 0;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[skyde] " << msg << "\n";
}

std::string fixed(double value, int decimals) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(decimals);
  out << value;
  return out.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out << text;
}

void write_bytes_file(const fs::path& path,
                      const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

ScenarioConfig load_config(const std::string& path, std::uint64_t seed_override) {
  ScenarioConfig cfg =
      path.empty() ? ScenarioConfig{} : ScenarioConfig::from_json_file(path);
  if (seed_override != 0) cfg.seed = seed_override;
  return cfg;
}

// Scalar metrics as a two-line CSV with a fixed, documented column order.
std::string metrics_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "steg_bandwidth_kbps,offered_bandwidth_kbps,total_loss_fraction,"
         "histogram_correlation,precision,recall,mean_packet_rate_pps,"
         "mean_silence_reference_b,packets_sent,packets_delivered,"
         "chunks_embedded,secret_bits_sent\n";
  out << fixed(r.steg_bandwidth_bps / 1000.0, 3) << ','
      << fixed(r.offered_bandwidth_bps / 1000.0, 3) << ','
      << fixed(r.total_loss_fraction, 6) << ','
      << (r.histogram_correlation ? fixed(*r.histogram_correlation, 6) : "")
      << ',' << (r.precision ? fixed(*r.precision, 6) : "") << ','
      << (r.recall ? fixed(*r.recall, 6) : "") << ','
      << fixed(r.mean_packet_rate, 2) << ','
      << fixed(r.mean_silence_reference, 2) << ',' << r.packets_sent << ','
      << r.packets_delivered << ',' << r.chunks_embedded << ','
      << r.secret_bits_sent << '\n';
  return out.str();
}

std::string series_csv(const std::vector<WindowSample>& series) {
  std::ostringstream out;
  out << "t_end_s,loss,packet_rate_pps,size_factor,reference_b,"
         "reference_valid,governor_active\n";
  for (const WindowSample& s : series) {
    out << fixed(s.t_end_s, 2) << ',' << fixed(s.loss, 6) << ','
        << fixed(s.packet_rate, 2) << ',' << fixed(s.size_factor, 3) << ','
        << fixed(s.reference, 3) << ',' << (s.reference_valid ? 1 : 0) << ','
        << (s.governor_active ? 1 : 0) << '\n';
  }
  return out.str();
}

int cmd_generate(const std::string& config_path, double duration,
                 std::uint64_t seed, const std::string& out_path) {
  ScenarioConfig cfg = load_config(config_path, seed);
  if (seed != 0) cfg.profile.seed = 0;  // rederive from the new master seed
  cfg = cfg.resolved();
  const double d = duration > 0.0 ? duration : cfg.duration_s;
  const std::vector<PacketRecord> trace = generate_call(cfg.profile, d);
  log_info("generate: " + std::to_string(trace.size()) + " packets");
  if (out_path.empty()) {
    write_trace(std::cout, trace);
  } else {
    write_trace_file(out_path, trace);
  }
  return 0;
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed,
                 const std::string& out_dir, const std::string& format) {
  const ScenarioConfig cfg = load_config(config_path, seed);
  const ScenarioResult result = run_scenario(cfg);
  const ByteHistogram cover = byte_histogram(result.cover_trace);
  const MetricsReport report = build_report(result, &cover, cfg.classifier);

  const fs::path dir(out_dir.empty() ? "." : out_dir);
  fs::create_directories(dir);
  write_trace_file((dir / "cover.jsonl").string(), result.cover_trace);
  write_trace_file((dir / "stego.jsonl").string(), result.stego_trace);
  write_trace_file((dir / "delivered.jsonl").string(), result.delivered_trace);
  write_bytes_file(dir / "secret_sent.bin", result.secret_sent);
  write_bytes_file(dir / "secret_recv.bin", result.secret_recv);
  write_text_file(dir / "config_echo.json", cfg.resolved().to_json_text() + "\n");
  write_text_file(dir / "metrics.json", report.to_json_text() + "\n");
  write_text_file(dir / "series.csv", series_csv(result.series));
  if (format == "csv") {
    write_text_file(dir / "metrics.csv", metrics_csv(report));
  }
  log_info("simulate: " + std::to_string(result.packets_sent) + " packets, " +
           std::to_string(result.stats.embedded) + " embedded");
  std::cout << "steg_bandwidth_kbps="
            << fixed(report.steg_bandwidth_bps / 1000.0, 3) << "\n";
  return 0;
}

int cmd_analyze(const std::string& trace_path, const std::string& against_path,
                int window_s, double delta, const std::string& format,
                const std::string& out_path) {
  const std::vector<PacketRecord> trace = read_trace_file(trace_path);
  if (trace.empty()) throw UndefinedStatisticError("trace is empty");
  ClassifierConfig ccfg;
  ccfg.window_s = window_s;
  ccfg.delta_bytes = delta;

  MetricsReport report;
  const ByteHistogram h = byte_histogram(trace);
  if (!against_path.empty()) {
    const std::vector<PacketRecord> against = read_trace_file(against_path);
    if (against.empty()) throw UndefinedStatisticError("trace is empty");
    report.histogram_correlation = pearson(byte_histogram(against), h);
  }
  const ClassifierScore score = score_classifier(trace, ccfg);
  if (score.true_positive + score.false_positive + score.false_negative > 0) {
    report.precision = score.precision();
    report.recall = score.recall();
  }
  const double duration_s =
      trace.size() < 2
          ? 0.0
          : static_cast<double>(trace.back().ts_us - trace.front().ts_us) / 1e6;
  report.mean_packet_rate =
      duration_s > 0.0 ? static_cast<double>(trace.size()) / duration_s : 0.0;
  report.packets_sent = trace.size();
  report.packets_delivered = trace.size();

  const std::string text =
      format == "csv" ? metrics_csv(report) : report.to_json_text() + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
  return 0;
}

struct SweepRow {
  int utilization_pct = 0;
  MetricsReport report;
  double predicted_kbps = 0.0;
  double pearson_vs_cover = 0.0;
  double silence_fraction = 0.0;
};

int cmd_sweep(const std::string& config_path, std::uint64_t seed,
              const std::string& out_dir, const std::string& format,
              int parallel, std::vector<int> points) {
  if (points.empty()) points = {0, 20, 30, 40, 50, 60, 80, 100};
  const ScenarioConfig base = load_config(config_path, seed);

  // Same seed across points: every run rides the same cover call.
  ScenarioConfig cover_cfg = base;
  cover_cfg.utilization = 0.0;
  const ScenarioResult cover_run = run_scenario(cover_cfg);
  const ByteHistogram cover_hist = byte_histogram(cover_run.cover_trace);
  const double silence_fraction =
      empirical_silence_fraction(cover_run.cover_trace);

  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= points.size()) return;
      ScenarioConfig cfg = base;
      cfg.utilization = static_cast<double>(points[i]) / 100.0;
      const ScenarioResult result = run_scenario(cfg);
      SweepRow& row = rows[i];
      row.utilization_pct = points[i];
      row.report = build_report(result, &cover_hist, cfg.classifier);
      row.pearson_vs_cover = row.report.histogram_correlation.value_or(0.0);
      row.silence_fraction = silence_fraction;
      const double rate = row.report.mean_packet_rate;
      const double ref = row.report.mean_silence_reference;
      row.predicted_kbps =
          ref > 0.0 ? predicted_bandwidth_bps(cfg.utilization, silence_fraction,
                                              rate, ref) /
                          1000.0
                    : 0.0;
    }
  };
  const int threads = std::max(1, parallel);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::ostringstream csv;
  csv << "utilization_pct,measured_kbps,predicted_kbps,silence_ref_b,"
         "packet_rate_pps,unusable_fraction,pearson_vs_cover\n";
  for (const SweepRow& row : rows) {
    csv << row.utilization_pct << ','
        << fixed(row.report.steg_bandwidth_bps / 1000.0, 3) << ','
        << fixed(row.predicted_kbps, 3) << ','
        << fixed(row.report.mean_silence_reference, 2) << ','
        << fixed(row.report.mean_packet_rate, 2) << ','
        << fixed(row.report.total_loss_fraction, 6) << ','
        << fixed(row.pearson_vs_cover, 6) << '\n';
  }

  const fs::path dir(out_dir.empty() ? "." : out_dir);
  fs::create_directories(dir);
  write_text_file(dir / "sweep.csv", csv.str());
  if (format == "json") {
    std::ostringstream json;
    json << "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      json << "  {\"utilization_pct\": " << rows[i].utilization_pct
           << ", \"metrics\": " << rows[i].report.to_json_text() << "}"
           << (i + 1 < rows.size() ? ",\n" : "\n");
    }
    json << "]\n";
    write_text_file(dir / "sweep.json", json.str());
  }
  std::cout << csv.str();
  return 0;
}

int cmd_report(const std::string& metrics_path, const std::string& format,
               const std::string& out_path, const std::string& series_path) {
  std::ifstream in(metrics_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open metrics file: " + metrics_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const MetricsReport report = MetricsReport::from_json_text(buf.str());
  const std::string text =
      format == "csv" ? metrics_csv(report) : report.to_json_text() + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
  if (!series_path.empty()) {
    write_text_file(series_path, series_csv(report.series));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SkyDe covert-channel laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "json", trace_path, against_path;
  std::string metrics_path, series_path;
  std::uint64_t seed = 0;
  double duration = 0.0;
  int parallel = 1;
  int window_s = 10;
  double delta = 20.0;
  std::vector<int> points;

  CLI::App* generate = app.add_subcommand("generate", "profile -> cover trace");
  generate->add_option("--config", config_path, "scenario config file");
  generate->add_option("--duration", duration, "call length in seconds");
  generate->add_option("--seed", seed, "master seed override");
  generate->add_option("--out", out_path, "trace file (default stdout)");

  CLI::App* simulate = app.add_subcommand("simulate", "run one scenario");
  simulate->add_option("--config", config_path, "scenario config file");
  simulate->add_option("--seed", seed, "master seed override");
  simulate->add_option("--out", out_path, "output directory");
  simulate->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  CLI::App* analyze = app.add_subcommand("analyze", "trace -> metrics");
  analyze->add_option("--trace", trace_path, "trace file")->required();
  analyze->add_option("--against", against_path, "cover trace for correlation");
  analyze->add_option("--window", window_s, "classifier window seconds");
  analyze->add_option("--delta", delta, "classifier delta bytes");
  analyze->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  analyze->add_option("--out", out_path, "output file (default stdout)");

  CLI::App* sweep = app.add_subcommand("sweep", "utilization grid");
  sweep->add_option("--config", config_path, "scenario config file");
  sweep->add_option("--seed", seed, "master seed override");
  sweep->add_option("--out", out_path, "output directory");
  sweep->add_option("--format", format, "csv or json (json adds sweep.json)")
      ->check(CLI::IsMember({"json", "csv"}));
  sweep->add_option("--parallel", parallel, "worker threads");
  sweep->add_option("--points", points, "utilization percentages");

  CLI::App* report = app.add_subcommand("report", "re-emit a metrics report");
  report->add_option("--metrics", metrics_path, "metrics.json file")->required();
  report->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  report->add_option("--out", out_path, "output file (default stdout)");
  report->add_option("--series", series_path, "also write the window series CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      return cmd_generate(config_path, duration, seed, out_path);
    }
    if (simulate->parsed()) {
      return cmd_simulate(config_path, seed, out_path, format);
    }
    if (analyze->parsed()) {
      return cmd_analyze(trace_path, against_path, window_s, delta, format,
                         out_path);
    }
    if (sweep->parsed()) {
      return cmd_sweep(config_path, seed, out_path, format, parallel, points);
    }
    if (report->parsed()) {
      return cmd_report(metrics_path, format, out_path, series_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "skyde: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
