#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "skyde/classifier.hpp"
#include "skyde/scenario.hpp"
#include "skyde/traffic.hpp"

namespace skyde {

/// Byte-value counts over full encoded datagrams (SoM header included).
struct ByteHistogram {
  std::array<std::uint64_t, 256> counts{};

  void add(std::span<const std::uint8_t> bytes);
  std::uint64_t total() const;

  /// Bin frequencies summing to 1. Throws UndefinedStatisticError when the
  /// histogram is empty.
  std::array<double, 256> normalized() const;
};

/// Histogram over every encoded datagram in the trace. Throws
/// UndefinedStatisticError on an empty trace.
ByteHistogram byte_histogram(std::span<const PacketRecord> trace);

/// Pearson correlation over the 256 paired normalized bin frequencies.
/// Throws UndefinedStatisticError when either histogram has zero variance.
double pearson(const ByteHistogram& h1, const ByteHistogram& h2);

/// B = u * s * R * 8L: utilization, silence fraction, packet rate and bytes
/// per used packet give the offered steganographic bandwidth in bits/s.
double predicted_bandwidth_bps(double utilization, double silence_fraction,
                               double packet_rate, double size_bytes);

/// Delivered chunk payload bits over call duration.
double measured_bandwidth_bps(const ScenarioResult& result);

/// Silence-detection quality against ground-truth labels. Warm-up packets
/// (classified Unknown) are excluded from scoring.
struct ClassifierScore {
  std::uint64_t true_positive = 0;
  std::uint64_t false_positive = 0;
  std::uint64_t false_negative = 0;
  std::uint64_t unknown = 0;

  double precision() const;
  double recall() const;
};

/// Replays the sliding-window classifier over a trace and scores it.
ClassifierScore score_classifier(std::span<const PacketRecord> trace,
                                 const ClassifierConfig& cfg);

struct MetricsReport {
  double steg_bandwidth_bps = 0.0;
  double offered_bandwidth_bps = 0.0;
  double total_loss_fraction = 0.0;
  std::optional<double> histogram_correlation;
  std::optional<double> precision;
  std::optional<double> recall;
  double mean_packet_rate = 0.0;
  double mean_silence_reference = 0.0;  // post warm-up
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t chunks_embedded = 0;
  std::uint64_t secret_bits_sent = 0;
  std::vector<WindowSample> series;

  std::string to_json_text() const;
  static MetricsReport from_json_text(const std::string& text);

  bool operator==(const MetricsReport&) const = default;
};

/// Report for one finished scenario; correlation is filled when a cover
/// histogram is supplied.
MetricsReport build_report(const ScenarioResult& result,
                           const ByteHistogram* cover = nullptr,
                           const ClassifierConfig& classifier = {});

}  // namespace skyde
