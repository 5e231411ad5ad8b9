#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "skyde/errors.hpp"
#include "skyde/metrics.hpp"
#include "skyde/scenario.hpp"
#include "skyde/trace_io.hpp"

using namespace skyde;

namespace {

ScenarioConfig base_config() {
  ScenarioConfig cfg;
  cfg.seed = 21;
  cfg.duration_s = 120.0;
  cfg.adaptation.enabled = false;
  return cfg;
}

std::multiset<std::size_t> size_multiset(const std::vector<PacketRecord>& trace) {
  std::multiset<std::size_t> out;
  for (const PacketRecord& rec : trace) out.insert(rec.datagram_size());
  return out;
}

std::string serialize(const ScenarioResult& result) {
  std::ostringstream out;
  write_trace(out, result.cover_trace);
  write_trace(out, result.stego_trace);
  write_trace(out, result.delivered_trace);
  out << build_report(result).to_json_text();
  return out.str();
}

}  // namespace

TEST_CASE("zero utilization on a lossless channel is a no-op") {
  ScenarioConfig cfg = base_config();
  cfg.utilization = 0.0;
  const ScenarioResult result = run_scenario(cfg);
  CHECK(result.secret_sent.empty());
  CHECK(result.secret_recv.empty());
  CHECK(result.stats.embedded == 0);
  CHECK(result.delivered_trace == result.cover_trace);
  CHECK(result.stego_trace == result.cover_trace);
}

TEST_CASE("full utilization lossless run stays near the silence fraction") {
  ScenarioConfig cfg = base_config();
  cfg.duration_s = 300.0;
  const ScenarioResult result = run_scenario(cfg);
  // Unusable = embedded only (p = 0); roughly the call's silence share,
  // minus the warm-up window.
  CHECK(result.total_unusable_fraction() > 0.30);
  CHECK(result.total_unusable_fraction() < 0.55);
  for (const WindowSample& s : result.series) {
    CHECK(s.governor_active);
  }
  // End-to-end identity on a lossless channel at utilization 1.0.
  CHECK(result.secret_recv == result.secret_sent);
  CHECK(std::all_of(result.recv_bitmap.begin(), result.recv_bitmap.end(),
                    [](bool b) { return b; }));
}

TEST_CASE("voice packets are never touched and sizes are preserved") {
  ScenarioConfig cfg = base_config();
  cfg.duration_s = 180.0;
  cfg.channel.loss = BernoulliLoss{0.2};
  const ScenarioResult result = run_scenario(cfg);
  REQUIRE(result.stats.embedded > 0);
  REQUIRE(result.cover_trace.size() == result.stego_trace.size());
  for (std::size_t i = 0; i < result.cover_trace.size(); ++i) {
    const PacketRecord& cover = result.cover_trace[i];
    const PacketRecord& stego = result.stego_trace[i];
    CHECK(cover.index == stego.index);
    if (cover.truth == Truth::Voice) {
      CHECK(cover.message == stego.message);
    }
    CHECK(cover.datagram_size() == stego.datagram_size());
    CHECK(cover.message.fun == stego.message.fun);
  }
  CHECK(size_multiset(result.cover_trace) == size_multiset(result.stego_trace));
}

TEST_CASE("loss composition follows 1-(1-p)(1-e)") {
  ScenarioConfig cfg = base_config();
  cfg.duration_s = 2000.0;  // ~1e5 packets
  cfg.channel.loss = BernoulliLoss{0.3};
  const ScenarioResult result = run_scenario(cfg);
  REQUIRE(result.packets_sent > 90'000);
  const double p = 0.3;
  const double e = result.embedded_fraction();
  const double predicted = 1.0 - (1.0 - p) * (1.0 - e);
  CHECK(result.total_unusable_fraction() ==
        doctest::Approx(predicted).epsilon(0.02));
}

TEST_CASE("governor caps heavy loss plus full utilization") {
  ScenarioConfig cfg = base_config();
  cfg.duration_s = 300.0;
  cfg.channel.loss = BernoulliLoss{0.5};
  const ScenarioResult result = run_scenario(cfg);
  // Unthrottled the total would be ~1-(1-0.5)(1-0.45) = 0.725.
  const double window_slack =
      static_cast<double>(cfg.classifier.window_s) / cfg.duration_s;
  CHECK(result.total_unusable_fraction() <= 0.70 + window_slack);
  CHECK(result.stats.suspended_by_governor > 0);
}

TEST_CASE("third-party taps at the endpoints degenerate to end-to-end") {
  ScenarioConfig e2e = base_config();
  ScenarioConfig tp = base_config();
  tp.mode = ScenarioMode::ThirdParty;
  const ScenarioResult a = run_scenario(e2e);
  const ScenarioResult b = run_scenario(tp);
  CHECK(a.secret_recv == b.secret_recv);
  CHECK(a.stego_trace == b.stego_trace);
  CHECK(a.delivered_trace == b.delivered_trace);
}

TEST_CASE("identical configs reproduce identical results") {
  ScenarioConfig cfg = base_config();
  cfg.duration_s = 90.0;
  cfg.channel.loss = BernoulliLoss{0.25};
  cfg.adaptation.enabled = true;
  const std::string a = serialize(run_scenario(cfg));
  const std::string b = serialize(run_scenario(cfg));
  CHECK(a == b);
  ScenarioConfig other = cfg;
  other.seed = 22;
  CHECK(serialize(run_scenario(other)) != a);
}

TEST_CASE("file secrets round trip") {
  ScenarioConfig cfg = base_config();
  cfg.duration_s = 60.0;
  const std::string path = "test_secret_roundtrip.bin";
  {
    std::vector<std::uint8_t> secret(512);
    for (std::size_t i = 0; i < secret.size(); ++i) {
      secret[i] = static_cast<std::uint8_t>(i * 7);
    }
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(secret.data()),
              static_cast<std::streamsize>(secret.size()));
  }
  cfg.secret.type = SecretSpec::Type::File;
  cfg.secret.path = path;
  const ScenarioResult result = run_scenario(cfg);
  CHECK(result.secret_sent.size() == 512);
  CHECK(result.secret_recv == result.secret_sent);
  std::remove(path.c_str());
}

TEST_CASE("invalid configs are rejected before execution") {
  ScenarioConfig cfg = base_config();
  cfg.utilization = 1.5;
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
  cfg = base_config();
  cfg.duration_s = -1.0;
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
  cfg = base_config();
  cfg.channel.loss = BernoulliLoss{1.2};
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
}

TEST_CASE("config json round trip") {
  ScenarioConfig cfg = base_config();
  cfg.mode = ScenarioMode::ThirdParty;
  cfg.utilization = 0.4;
  cfg.channel.loss = GilbertElliottLoss{0.1, 0.4, 0.01, 0.9};
  cfg.secret.length = 4096;
  const ScenarioConfig back = ScenarioConfig::from_json_text(cfg.to_json_text());
  CHECK(back.to_json_text() == cfg.to_json_text());
  CHECK(back.mode == ScenarioMode::ThirdParty);
  CHECK(back.utilization == 0.4);
  CHECK(back.secret.length == 4096);
}

TEST_CASE("config parser flags schema mismatches") {
  CHECK_THROWS_AS(ScenarioConfig::from_json_text("{nope"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::from_json_text(R"({"bogus_key": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(
      ScenarioConfig::from_json_text(R"({"channel": {"loss": {"type": "x"}}})"),
      ConfigError);
  CHECK_THROWS_AS(
      ScenarioConfig::from_json_text(
          R"({"profile": {"speech_ratio": 0.7, "mean_silence_s": 2.45}})"),
      ConfigError);
  // speech_ratio alone retunes the silence mean.
  const ScenarioConfig cfg = ScenarioConfig::from_json_text(
      R"({"profile": {"speech_ratio": 0.5}})");
  CHECK(cfg.profile.speech_ratio() == doctest::Approx(0.5));
}
