#include "skyde/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skyde/errors.hpp"

namespace skyde {

namespace {
constexpr std::uint8_t kSignalingFuns[] = {0x02, 0x03, 0x07, 0x0f};
}

void TrafficProfile::set_speech_ratio(double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("speech ratio must lie in (0, 1)");
  }
  mean_silence_s = mean_talkspurt_s * (1.0 - ratio) / ratio;
}

void TrafficProfile::validate() const {
  if (!(mean_talkspurt_s > 0.0) || !(mean_silence_s > 0.0)) {
    throw std::invalid_argument("segment means must be positive");
  }
  if (!(packet_rate > 0.0)) {
    throw std::invalid_argument("packet rate must be positive");
  }
  for (const SizeSpec* s : {&silence_size, &voice_size}) {
    if (s->min < static_cast<int>(kSomHeaderBytes) + 1 || s->max < s->min) {
      throw std::invalid_argument("size bounds must allow a nonempty payload");
    }
    if (s->stddev < 0.0) {
      throw std::invalid_argument("size stddev must be nonnegative");
    }
  }
  if (signaling_fraction < 0.0 || signaling_fraction >= 1.0) {
    throw std::invalid_argument("signaling fraction must lie in [0, 1)");
  }
}

CallGenerator::CallGenerator(const TrafficProfile& profile)
    : profile_(profile), rng_(profile.seed), rate_(profile.packet_rate) {
  profile_.validate();
  in_talkspurt_ = rng_.bernoulli(profile_.speech_ratio());
  seg_end_s_ = rng_.exponential(in_talkspurt_ ? profile_.mean_talkspurt_s
                                              : profile_.mean_silence_s);
}

void CallGenerator::advance_segments() {
  while (t_s_ >= seg_end_s_) {
    in_talkspurt_ = !in_talkspurt_;
    seg_end_s_ += rng_.exponential(in_talkspurt_ ? profile_.mean_talkspurt_s
                                                 : profile_.mean_silence_s);
  }
}

int CallGenerator::draw_size(const SizeSpec& spec) {
  const double f = size_factor_;
  const double lo = std::round(spec.min * f);
  const double hi = std::round(spec.max * f);
  const double raw = rng_.normal(spec.mean * f, spec.stddev * f);
  return static_cast<int>(std::clamp(std::round(raw), lo, hi));
}

PacketRecord CallGenerator::next() {
  advance_segments();

  PacketRecord rec;
  rec.index = index_++;
  rec.ts_us = static_cast<std::uint64_t>(std::llround(t_s_ * 1e6));

  const bool signaling = rng_.bernoulli(profile_.signaling_fraction);
  const SizeSpec& spec =
      in_talkspurt_ ? profile_.voice_size : profile_.silence_size;
  const int size = draw_size(spec);
  const std::size_t payload_len =
      static_cast<std::size_t>(std::max(1, size - static_cast<int>(kSomHeaderBytes)));

  rec.message.id = static_cast<std::uint16_t>(rng_.below(0x10000));
  if (signaling) {
    rec.truth = Truth::Signaling;
    rec.message.fun = kSignalingFuns[rng_.below(4)];
  } else {
    rec.truth = in_talkspurt_ ? Truth::Voice : Truth::Silence;
    rec.message.fun = static_cast<std::uint8_t>((rng_.below(8) << 4) | 0x0d);
  }
  rec.message.payload.resize(payload_len);
  rng_.fill_bytes(rec.message.payload);  // models the encrypted payload

  const double tick = 1.0 / rate_;
  t_s_ += tick * (1.0 + 0.1 * rng_.uniform(-1.0, 1.0));
  return rec;
}

void CallGenerator::set_rate(double packets_per_second) {
  if (!(packets_per_second > 0.0)) {
    throw std::invalid_argument("packet rate must be positive");
  }
  rate_ = packets_per_second;
}

void CallGenerator::set_size_factor(double factor) {
  if (!(factor >= 1.0)) {
    throw std::invalid_argument("size factor must be >= 1");
  }
  size_factor_ = factor;
}

std::vector<PacketRecord> generate_call(const TrafficProfile& profile,
                                        double duration_s) {
  if (!(duration_s > 0.0)) {
    throw std::invalid_argument("duration must be positive");
  }
  CallGenerator gen(profile);
  std::vector<PacketRecord> trace;
  trace.reserve(static_cast<std::size_t>(duration_s * profile.packet_rate * 1.1));
  while (gen.next_time_s() < duration_s) {
    trace.push_back(gen.next());
  }
  return trace;
}

double empirical_silence_fraction(std::span<const PacketRecord> trace) {
  std::uint64_t silence = 0;
  std::uint64_t data = 0;
  for (const PacketRecord& rec : trace) {
    if (rec.truth == Truth::Signaling) continue;
    ++data;
    if (rec.truth == Truth::Silence) ++silence;
  }
  if (data == 0) {
    throw UndefinedStatisticError("trace holds no data packets");
  }
  return static_cast<double>(silence) / static_cast<double>(data);
}

}  // namespace skyde
