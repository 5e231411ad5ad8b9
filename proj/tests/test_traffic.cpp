#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "skyde/errors.hpp"
#include "skyde/som.hpp"
#include "skyde/traffic.hpp"

using namespace skyde;

namespace {

TrafficProfile profile_with_seed(std::uint64_t seed) {
  TrafficProfile p;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("default profile keeps ratio and means consistent") {
  const TrafficProfile p;
  CHECK(p.speech_ratio() ==
        doctest::Approx(p.mean_talkspurt_s /
                        (p.mean_talkspurt_s + p.mean_silence_s))
            .epsilon(1e-12));
  CHECK(p.speech_ratio() == doctest::Approx(0.55).epsilon(0.01));

  TrafficProfile q;
  q.set_speech_ratio(0.7);
  CHECK(q.speech_ratio() == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("packet count tracks duration times rate") {
  const std::vector<PacketRecord> trace =
      generate_call(profile_with_seed(7), 300.0);
  CHECK(trace.size() > 15000 * 0.99);
  CHECK(trace.size() < 15000 * 1.01);
}

TEST_CASE("timestamps strictly increase with bounded jitter") {
  const std::vector<PacketRecord> trace =
      generate_call(profile_with_seed(11), 60.0);
  const double tick_us = 1e6 / 50.0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const auto gap = static_cast<double>(trace[i].ts_us - trace[i - 1].ts_us);
    CHECK(trace[i].ts_us > trace[i - 1].ts_us);
    CHECK(gap >= 0.9 * tick_us - 1.0);
    CHECK(gap <= 1.1 * tick_us + 1.0);
  }
}

TEST_CASE("silence fraction averages near 45 percent") {
  // A single 300 s call wobbles by several points (roughly 55 talk/silence
  // cycles); the anchor is checked on the mean across 20 seeds.
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    sum += empirical_silence_fraction(
        generate_call(profile_with_seed(seed), 300.0));
  }
  const double mean = sum / 20.0;
  CHECK(mean >= 0.43);
  CHECK(mean <= 0.47);
}

TEST_CASE("empirical_silence_fraction edge cases") {
  TrafficProfile all_silence = profile_with_seed(3);
  all_silence.mean_talkspurt_s = 1e-6;
  all_silence.mean_silence_s = 1e6;
  all_silence.signaling_fraction = 0.0;
  const std::vector<PacketRecord> silent = generate_call(all_silence, 30.0);
  CHECK(empirical_silence_fraction(silent) == doctest::Approx(1.0));

  std::vector<PacketRecord> signaling_only;
  for (const PacketRecord& rec : silent) {
    PacketRecord copy = rec;
    copy.truth = Truth::Signaling;
    signaling_only.push_back(copy);
  }
  CHECK_THROWS_AS(empirical_silence_fraction(signaling_only),
                  UndefinedStatisticError);
  CHECK_THROWS_AS(empirical_silence_fraction(std::vector<PacketRecord>{}),
                  UndefinedStatisticError);
}

TEST_CASE("same profile and seed reproduce the trace byte for byte") {
  const std::vector<PacketRecord> a = generate_call(profile_with_seed(42), 45.0);
  const std::vector<PacketRecord> b = generate_call(profile_with_seed(42), 45.0);
  CHECK(a == b);
  const std::vector<PacketRecord> c = generate_call(profile_with_seed(43), 45.0);
  CHECK(a != c);
}

TEST_CASE("voice packets dwarf silence packets in size") {
  const std::vector<PacketRecord> trace =
      generate_call(profile_with_seed(5), 300.0);
  double sum_v = 0, sum_s = 0, sq_v = 0, sq_s = 0;
  std::size_t n_v = 0, n_s = 0;
  for (const PacketRecord& rec : trace) {
    const double size = static_cast<double>(rec.datagram_size());
    if (rec.truth == Truth::Voice) {
      sum_v += size;
      sq_v += size * size;
      ++n_v;
    } else if (rec.truth == Truth::Silence) {
      sum_s += size;
      sq_s += size * size;
      ++n_s;
    }
  }
  REQUIRE(n_v > 100);
  REQUIRE(n_s > 100);
  const double mean_v = sum_v / static_cast<double>(n_v);
  const double mean_s = sum_s / static_cast<double>(n_s);
  const double var_v = sq_v / static_cast<double>(n_v) - mean_v * mean_v;
  const double var_s = sq_s / static_cast<double>(n_s) - mean_s * mean_s;
  const double pooled = std::sqrt(
      (var_v * static_cast<double>(n_v) + var_s * static_cast<double>(n_s)) /
      static_cast<double>(n_v + n_s));
  CHECK(mean_v - mean_s >= 3.0 * pooled);
}

TEST_CASE("byte histogram shows the eight Fun peaks over uniform noise") {
  TrafficProfile p = profile_with_seed(9);
  p.signaling_fraction = 0.0;
  const std::vector<PacketRecord> trace = generate_call(p, 300.0);
  REQUIRE(trace.size() >= 10'000);

  std::array<std::uint64_t, 256> counts{};
  for (const PacketRecord& rec : trace) {
    for (std::uint8_t b : encode_som(rec.message)) ++counts[b];
  }

  const std::array<int, 8> peaks = {0x0d, 0x1d, 0x2d, 0x3d, 0x4d, 0x5d, 0x6d, 0x7d};
  auto is_peak = [&](int v) {
    return std::find(peaks.begin(), peaks.end(), v) != peaks.end();
  };

  // Every data packet contributes one Fun byte spread over the eight peak
  // values; everything else is uniform. Each peak must clear every non-peak
  // bin and carry the expected per-peak excess of one eighth of the packets.
  std::uint64_t max_rest = 0;
  double rest_total = 0.0;
  for (int v = 0; v < 256; ++v) {
    if (!is_peak(v)) {
      max_rest = std::max(max_rest, counts[v]);
      rest_total += static_cast<double>(counts[v]);
    }
  }
  const double rest_mean = rest_total / 248.0;
  const double per_peak = static_cast<double>(trace.size()) / 8.0;
  for (int peak : peaks) {
    CHECK(counts[peak] > max_rest);
    const double excess = static_cast<double>(counts[peak]) - rest_mean;
    CHECK(excess > per_peak - 5.0 * std::sqrt(static_cast<double>(counts[peak])));
    CHECK(excess < per_peak + 5.0 * std::sqrt(static_cast<double>(counts[peak])));
  }

  // Non-peak bins: chi-square uniformity, 248 bins, significance 0.01.
  double chi2 = 0.0;
  for (int v = 0; v < 256; ++v) {
    if (!is_peak(v)) {
      const double d = static_cast<double>(counts[v]) - rest_mean;
      chi2 += d * d / rest_mean;
    }
  }
  CHECK(chi2 < 301.63);  // chi2 quantile, 0.99, 247 dof
}
