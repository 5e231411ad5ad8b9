#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skyde/channel.hpp"
#include "skyde/cipher.hpp"
#include "skyde/classifier.hpp"
#include "skyde/steg.hpp"
#include "skyde/traffic.hpp"

namespace skyde {

/// EndToEnd: the covert endpoints are the call's own participants.
/// ThirdParty: the covert transmitter taps an existing call mid-path; an
/// optional extra channel segment sits between the overt sender and the tap.
/// With the default lossless tap segment the two modes coincide.
enum class ScenarioMode : std::uint8_t { EndToEnd, ThirdParty };

struct SecretSpec {
  enum class Type : std::uint8_t { Random, File } type = Type::Random;
  std::uint64_t seed = 0;  // 0: derived from the master seed
  std::optional<std::size_t> length;  // Random only; empty = unbounded
  std::string path;                   // File only
};

struct ScenarioConfig {
  ScenarioMode mode = ScenarioMode::EndToEnd;
  double utilization = 1.0;
  double duration_s = 300.0;
  std::uint64_t seed = 1;  // master seed; unset sub-seeds derive from it
  TrafficProfile profile;
  ChannelConfig channel;
  ChannelConfig tap_channel;
  ClassifierConfig classifier;
  RateAdaptation adaptation;
  double governor_threshold = 0.70;
  std::optional<KeyMaterial> keys;  // empty: derived from the master seed
  SecretSpec secret;

  void validate() const;

  /// Fills unset sub-seeds and key material from the master seed; called by
  /// run_scenario, exposed for tests and tooling.
  ScenarioConfig resolved() const;

  static ScenarioConfig from_json_text(const std::string& text);
  static ScenarioConfig from_json_file(const std::string& path);
  std::string to_json_text() const;
};

/// One governor-window sample of the call's observable state.
struct WindowSample {
  double t_end_s = 0.0;
  double loss = 0.0;         // unusable fraction over the window
  double packet_rate = 0.0;  // rate in force at window end
  double size_factor = 1.0;
  double reference = 0.0;  // silence reference r (valid flag below)
  bool reference_valid = false;
  bool governor_active = true;
};

struct ScenarioResult {
  std::vector<PacketRecord> cover_trace;      // as generated
  std::vector<PacketRecord> stego_trace;      // as sent past the embedder
  std::vector<PacketRecord> delivered_trace;  // as received
  std::vector<std::uint8_t> secret_sent;
  std::vector<std::uint8_t> secret_recv;
  std::vector<bool> recv_bitmap;  // per chunk seq
  EmbedStats stats;
  std::vector<WindowSample> series;
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t packets_unusable = 0;  // channel-lost or embedded
  std::uint64_t offered_payload_bits = 0;
  std::uint64_t delivered_payload_bits = 0;
  double duration_s = 0.0;

  double total_unusable_fraction() const {
    return packets_sent == 0 ? 0.0
                             : static_cast<double>(packets_unusable) /
                                   static_cast<double>(packets_sent);
  }
  double embedded_fraction() const {
    return packets_sent == 0 ? 0.0
                             : static_cast<double>(stats.embedded) /
                                   static_cast<double>(packets_sent);
  }
};

/// Wires generator -> transmitter-side classifier/governor -> embedder ->
/// channel -> receiver-side classifier -> extractor -> reassembly, with the
/// overt application's rate adaptation closing the loop on observed loss
/// (channel losses plus embedded packets). Single-threaded over a virtual
/// clock; fully deterministic for a given config.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

}  // namespace skyde
