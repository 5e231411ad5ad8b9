#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "skyde/rng.hpp"
#include "skyde/som.hpp"

namespace skyde {

/// Normal size distribution clipped to [min, max]; sizes are whole-datagram
/// bytes (SoM header included).
struct SizeSpec {
  double mean = 0.0;
  double stddev = 0.0;
  int min = 0;
  int max = 0;
};

/// Parameters of the synthetic call. The speech ratio is derived from the
/// talkspurt/silence means (3.00 s / 2.45 s by default, i.e. roughly 55:45)
/// rather than stored, so the two can never disagree.
struct TrafficProfile {
  double mean_talkspurt_s = 3.0;
  double mean_silence_s = 2.45;
  double packet_rate = 50.0;  // nominal tiers: 16, 33 or 50 pps
  SizeSpec silence_size{38.0, 3.0, 25, 60};
  SizeSpec voice_size{110.0, 25.0, 60, 220};
  double signaling_fraction = 0.005;
  std::uint64_t seed = 1;

  double speech_ratio() const {
    return mean_talkspurt_s / (mean_talkspurt_s + mean_silence_s);
  }

  /// Rescales mean_silence_s so that speech_ratio() == ratio.
  void set_speech_ratio(double ratio);

  /// Throws std::invalid_argument on nonsensical parameters.
  void validate() const;
};

enum class Truth : std::uint8_t { Voice, Silence, Signaling };

/// One generated packet with its ground-truth label. The label is carried
/// through the pipeline for scoring only; no component may branch on it.
struct PacketRecord {
  std::uint64_t index = 0;
  std::uint64_t ts_us = 0;
  SomMessage message;
  Truth truth = Truth::Silence;

  bool operator==(const PacketRecord&) const = default;

  std::size_t datagram_size() const { return message.datagram_size(); }
};

/// Incremental packet source driving the talkspurt/silence on-off process.
/// Rate and size factor can be retuned mid-call (the overt application's
/// adaptation); the speech process itself evolves in call time and is not
/// affected by such retuning.
class CallGenerator {
 public:
  explicit CallGenerator(const TrafficProfile& profile);

  /// Call time (seconds) at which next() would emit.
  double next_time_s() const { return t_s_; }

  PacketRecord next();

  void set_rate(double packets_per_second);
  void set_size_factor(double factor);

  double rate() const { return rate_; }
  double size_factor() const { return size_factor_; }

 private:
  int draw_size(const SizeSpec& spec);
  void advance_segments();

  TrafficProfile profile_;
  Rng rng_;
  double t_s_ = 0.0;
  double seg_end_s_ = 0.0;
  bool in_talkspurt_ = false;
  double rate_;
  double size_factor_ = 1.0;
  std::uint64_t index_ = 0;
};

/// Whole-call convenience wrapper around CallGenerator at fixed rate.
std::vector<PacketRecord> generate_call(const TrafficProfile& profile,
                                        double duration_s);

/// Fraction of data packets (Voice or Silence truth) labeled Silence.
/// Throws UndefinedStatisticError when the trace holds no data packets.
double empirical_silence_fraction(std::span<const PacketRecord> trace);

}  // namespace skyde
