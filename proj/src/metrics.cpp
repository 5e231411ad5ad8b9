#include "skyde/metrics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "skyde/errors.hpp"
#include "skyde/som.hpp"

namespace skyde {

void ByteHistogram::add(std::span<const std::uint8_t> bytes) {
  for (std::uint8_t b : bytes) ++counts[b];
}

std::uint64_t ByteHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::array<double, 256> ByteHistogram::normalized() const {
  const std::uint64_t n = total();
  if (n == 0) throw UndefinedStatisticError("histogram is empty");
  std::array<double, 256> out{};
  for (std::size_t i = 0; i < 256; ++i) {
    out[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  }
  return out;
}

ByteHistogram byte_histogram(std::span<const PacketRecord> trace) {
  if (trace.empty()) throw UndefinedStatisticError("trace is empty");
  ByteHistogram h;
  for (const PacketRecord& rec : trace) {
    h.add(encode_som(rec.message));
  }
  return h;
}

double pearson(const ByteHistogram& h1, const ByteHistogram& h2) {
  const std::array<double, 256> a = h1.normalized();
  const std::array<double, 256> b = h2.normalized();
  const double mean_a = 1.0 / 256.0;  // normalized bins sum to 1
  const double mean_b = 1.0 / 256.0;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < 256; ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) {
    throw UndefinedStatisticError("zero-variance histogram");
  }
  return cov / std::sqrt(var_a * var_b);
}

double predicted_bandwidth_bps(double utilization, double silence_fraction,
                               double packet_rate, double size_bytes) {
  if (!(utilization >= 0.0 && utilization <= 1.0) ||
      !(silence_fraction >= 0.0 && silence_fraction <= 1.0)) {
    throw std::invalid_argument("fractions must lie in [0, 1]");
  }
  if (!(packet_rate > 0.0) || !(size_bytes > 0.0)) {
    throw std::invalid_argument("rate and size must be positive");
  }
  return utilization * silence_fraction * packet_rate * 8.0 * size_bytes;
}

double measured_bandwidth_bps(const ScenarioResult& result) {
  if (!(result.duration_s > 0.0)) {
    throw std::invalid_argument("result has no duration");
  }
  return static_cast<double>(result.delivered_payload_bits) / result.duration_s;
}

double ClassifierScore::precision() const {
  const std::uint64_t denom = true_positive + false_positive;
  return denom == 0 ? 0.0
                    : static_cast<double>(true_positive) /
                          static_cast<double>(denom);
}

double ClassifierScore::recall() const {
  const std::uint64_t denom = true_positive + false_negative;
  return denom == 0 ? 0.0
                    : static_cast<double>(true_positive) /
                          static_cast<double>(denom);
}

ClassifierScore score_classifier(std::span<const PacketRecord> trace,
                                 const ClassifierConfig& cfg) {
  SilenceReference ref(cfg);
  ClassifierScore score;
  for (const PacketRecord& rec : trace) {
    if (!is_data_fun(rec.message.fun)) continue;
    ref.observe(rec.datagram_size(), rec.ts_us);
    const Classification cls = ref.classify(rec.datagram_size());
    if (cls == Classification::Unknown) {
      ++score.unknown;
      continue;
    }
    const bool truth_silence = rec.truth == Truth::Silence;
    const bool predicted_silence = cls == Classification::Silence;
    if (predicted_silence && truth_silence) ++score.true_positive;
    if (predicted_silence && !truth_silence) ++score.false_positive;
    if (!predicted_silence && truth_silence) ++score.false_negative;
  }
  return score;
}

namespace {

nlohmann::json sample_to_json(const WindowSample& s) {
  return {
      {"t_end_s", s.t_end_s},
      {"loss", s.loss},
      {"packet_rate", s.packet_rate},
      {"size_factor", s.size_factor},
      {"reference", s.reference},
      {"reference_valid", s.reference_valid},
      {"governor_active", s.governor_active},
  };
}

WindowSample sample_from_json(const nlohmann::json& j) {
  WindowSample s;
  s.t_end_s = j.at("t_end_s").get<double>();
  s.loss = j.at("loss").get<double>();
  s.packet_rate = j.at("packet_rate").get<double>();
  s.size_factor = j.at("size_factor").get<double>();
  s.reference = j.at("reference").get<double>();
  s.reference_valid = j.at("reference_valid").get<bool>();
  s.governor_active = j.at("governor_active").get<bool>();
  return s;
}

}  // namespace

std::string MetricsReport::to_json_text() const {
  nlohmann::json j = {
      {"steg_bandwidth_bps", steg_bandwidth_bps},
      {"offered_bandwidth_bps", offered_bandwidth_bps},
      {"total_loss_fraction", total_loss_fraction},
      {"mean_packet_rate", mean_packet_rate},
      {"mean_silence_reference", mean_silence_reference},
      {"packets_sent", packets_sent},
      {"packets_delivered", packets_delivered},
      {"chunks_embedded", chunks_embedded},
      {"secret_bits_sent", secret_bits_sent},
  };
  if (histogram_correlation) j["histogram_correlation"] = *histogram_correlation;
  if (precision) j["precision"] = *precision;
  if (recall) j["recall"] = *recall;
  nlohmann::json arr = nlohmann::json::array();
  for (const WindowSample& s : series) arr.push_back(sample_to_json(s));
  j["series"] = std::move(arr);
  return j.dump(2);
}

MetricsReport MetricsReport::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw ConfigError("metrics report is not valid JSON");
  }
  MetricsReport r;
  try {
    r.steg_bandwidth_bps = j.at("steg_bandwidth_bps").get<double>();
    r.offered_bandwidth_bps = j.at("offered_bandwidth_bps").get<double>();
    r.total_loss_fraction = j.at("total_loss_fraction").get<double>();
    r.mean_packet_rate = j.at("mean_packet_rate").get<double>();
    r.mean_silence_reference = j.at("mean_silence_reference").get<double>();
    r.packets_sent = j.at("packets_sent").get<std::uint64_t>();
    r.packets_delivered = j.at("packets_delivered").get<std::uint64_t>();
    r.chunks_embedded = j.at("chunks_embedded").get<std::uint64_t>();
    r.secret_bits_sent = j.at("secret_bits_sent").get<std::uint64_t>();
    if (j.contains("histogram_correlation")) {
      r.histogram_correlation = j.at("histogram_correlation").get<double>();
    }
    if (j.contains("precision")) r.precision = j.at("precision").get<double>();
    if (j.contains("recall")) r.recall = j.at("recall").get<double>();
    for (const nlohmann::json& s : j.at("series")) {
      r.series.push_back(sample_from_json(s));
    }
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("metrics report misses a required field");
  }
  return r;
}

MetricsReport build_report(const ScenarioResult& result,
                           const ByteHistogram* cover,
                           const ClassifierConfig& classifier) {
  MetricsReport r;
  r.steg_bandwidth_bps = measured_bandwidth_bps(result);
  r.offered_bandwidth_bps =
      static_cast<double>(result.offered_payload_bits) / result.duration_s;
  r.total_loss_fraction = result.total_unusable_fraction();
  r.packets_sent = result.packets_sent;
  r.packets_delivered = result.packets_delivered;
  r.chunks_embedded = result.stats.embedded;
  r.secret_bits_sent = result.stats.secret_bits_sent;
  r.mean_packet_rate =
      result.duration_s > 0.0
          ? static_cast<double>(result.packets_sent) / result.duration_s
          : 0.0;
  double ref_sum = 0.0;
  std::size_t ref_n = 0;
  for (const WindowSample& s : result.series) {
    if (s.reference_valid) {
      ref_sum += s.reference;
      ++ref_n;
    }
  }
  r.mean_silence_reference = ref_n == 0 ? 0.0 : ref_sum / static_cast<double>(ref_n);
  r.series = result.series;
  if (cover && !result.stego_trace.empty()) {
    r.histogram_correlation = pearson(*cover, byte_histogram(result.stego_trace));
  }
  if (!result.cover_trace.empty()) {
    // Classifier quality is scored on the cover stream, where truth labels
    // still match what the transmitter-side classifier saw.
    const ClassifierScore score =
        score_classifier(result.cover_trace, classifier);
    if (score.true_positive + score.false_positive + score.false_negative > 0) {
      r.precision = score.precision();
      r.recall = score.recall();
    }
  }
  return r;
}

}  // namespace skyde
