#include "skyde/scenario.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "skyde/errors.hpp"

namespace skyde {

namespace {

// Sub-seed derivation tags; arbitrary distinct constants.
constexpr std::uint64_t kTagTraffic = 0x74726166;
constexpr std::uint64_t kTagChannel = 0x6368616e;
constexpr std::uint64_t kTagTap = 0x746170;
constexpr std::uint64_t kTagEmbed = 0x656d6264;
constexpr std::uint64_t kTagSecret = 0x73656372;
constexpr std::uint64_t kTagKeys = 0x6b657973;

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open secret file: " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(utilization >= 0.0 && utilization <= 1.0)) {
    throw ConfigError("utilization must lie in [0, 1]");
  }
  if (!(duration_s > 0.0)) throw ConfigError("duration must be positive");
  if (!(governor_threshold > 0.0 && governor_threshold <= 1.0)) {
    throw ConfigError("governor threshold must lie in (0, 1]");
  }
  try {
    profile.validate();
    channel.validate();
    tap_channel.validate();
    classifier.validate();
    adaptation.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (secret.type == SecretSpec::Type::File && secret.path.empty()) {
    throw ConfigError("secret file path missing");
  }
}

ScenarioConfig ScenarioConfig::resolved() const {
  ScenarioConfig out = *this;
  if (out.profile.seed == 0) out.profile.seed = mix_seed(seed ^ kTagTraffic);
  if (out.channel.seed == 0) out.channel.seed = mix_seed(seed ^ kTagChannel);
  if (out.tap_channel.seed == 0) out.tap_channel.seed = mix_seed(seed ^ kTagTap);
  if (out.secret.seed == 0) out.secret.seed = mix_seed(seed ^ kTagSecret);
  if (!out.keys) {
    KeyMaterial km;
    Rng rng(mix_seed(seed ^ kTagKeys));
    rng.fill_bytes(km.key);
    rng.fill_bytes(km.call_nonce);
    out.keys = km;
  }
  return out;
}

ScenarioResult run_scenario(const ScenarioConfig& raw_cfg) {
  raw_cfg.validate();
  const ScenarioConfig cfg = raw_cfg.resolved();

  CallGenerator gen(cfg.profile);
  SilenceReference tx_ref(cfg.classifier);
  SilenceReference rx_ref(cfg.classifier);
  LossGovernor governor(cfg.governor_threshold);
  Rng embed_rng(mix_seed(cfg.seed ^ kTagEmbed));

  SecretStream secret =
      cfg.secret.type == SecretSpec::Type::File
          ? SecretStream::from_bytes(read_file_bytes(cfg.secret.path))
          : SecretStream::random(cfg.secret.seed, cfg.secret.length);
  StegTransmitter tx(*cfg.keys, std::move(secret));
  StegReceiver rx(*cfg.keys);

  Channel channel(cfg.channel);
  std::optional<Channel> tap;
  if (cfg.mode == ScenarioMode::ThirdParty) tap.emplace(cfg.tap_channel);

  ScenarioResult result;
  result.duration_s = cfg.duration_s;

  const double window_s = static_cast<double>(cfg.classifier.window_s);
  double window_end = window_s;
  std::uint64_t window_sent = 0;
  std::uint64_t window_unusable = 0;

  double adapt_end = cfg.adaptation.period_s;
  std::uint64_t adapt_sent = 0;
  std::uint64_t adapt_unusable = 0;
  std::deque<double> adapt_history;

  auto close_window = [&](double t_end) {
    const GovernorDecision decision = governor.update(window_sent, window_unusable);
    (void)decision;
    WindowSample sample;
    sample.t_end_s = t_end;
    sample.loss = governor.last_ratio();
    sample.packet_rate = gen.rate();
    sample.size_factor = gen.size_factor();
    const std::optional<double> r = tx_ref.reference();
    sample.reference_valid = r.has_value();
    sample.reference = r.value_or(0.0);
    sample.governor_active = governor.active();
    result.series.push_back(sample);
    window_sent = 0;
    window_unusable = 0;
  };

  auto close_adapt_period = [&] {
    const double loss =
        adapt_sent == 0 ? 0.0
                        : static_cast<double>(adapt_unusable) /
                              static_cast<double>(adapt_sent);
    adapt_history.push_back(loss);
    while (adapt_history.size() >
           static_cast<std::size_t>(cfg.adaptation.smoothing_windows)) {
      adapt_history.pop_front();
    }
    const double smoothed =
        std::accumulate(adapt_history.begin(), adapt_history.end(), 0.0) /
        static_cast<double>(adapt_history.size());
    const auto [rate, factor] = cfg.adaptation.adapt(smoothed);
    gen.set_rate(rate);
    gen.set_size_factor(factor);
    adapt_sent = 0;
    adapt_unusable = 0;
  };

  while (gen.next_time_s() < cfg.duration_s) {
    const double t = gen.next_time_s();
    while (window_end <= t) {
      close_window(window_end);
      window_end += window_s;
    }
    if (cfg.adaptation.enabled) {
      while (adapt_end <= t) {
        close_adapt_period();
        adapt_end += cfg.adaptation.period_s;
      }
    }

    PacketRecord pkt = gen.next();
    result.cover_trace.push_back(pkt);
    ++result.packets_sent;
    ++window_sent;
    ++adapt_sent;

    const bool reached_tap = tap ? tap->deliver() : true;
    bool embedded_here = false;
    if (reached_tap) {
      ++result.stats.packets_seen;
      if (is_data_fun(pkt.message.fun)) {
        tx_ref.observe(pkt.datagram_size(), pkt.ts_us);
        if (tx_ref.classify(pkt.datagram_size()) == Classification::Silence) {
          ++result.stats.silence_identified;
          if (governor.active()) {
            if (embed_rng.bernoulli(cfg.utilization)) {
              const std::size_t before = tx.bytes_consumed();
              if (std::optional<SomMessage> stego = tx.embed_next(pkt.message)) {
                pkt.message = std::move(*stego);
                embedded_here = true;
                ++result.stats.embedded;
                result.stats.secret_bits_sent += (tx.bytes_consumed() - before) * 8;
                result.offered_payload_bits += pkt.message.payload.size() * 8;
              }
            }
          } else {
            ++result.stats.suspended_by_governor;
          }
        }
      }
      result.stego_trace.push_back(pkt);
    }

    const bool delivered = reached_tap && channel.deliver();
    if (!delivered || embedded_here) {
      ++result.packets_unusable;
      ++window_unusable;
      ++adapt_unusable;
    }
    if (delivered) {
      ++result.packets_delivered;
      result.delivered_trace.push_back(pkt);
      if (is_data_fun(pkt.message.fun)) {
        rx_ref.observe(pkt.datagram_size(), pkt.ts_us);
        if (rx_ref.classify(pkt.datagram_size()) == Classification::Silence) {
          result.delivered_payload_bits += rx.try_accept(pkt.message);
        }
      }
    }
  }
  close_window(std::min(window_end, cfg.duration_s));

  result.secret_sent.assign(
      tx.secret_sent().begin(),
      tx.secret_sent().begin() + static_cast<std::ptrdiff_t>(tx.bytes_consumed()));
  auto [bytes, bitmap] = rx.reassemble_all(tx.bytes_consumed());
  result.secret_recv = std::move(bytes);
  result.recv_bitmap = std::move(bitmap);
  return result;
}

}  // namespace skyde
