#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "skyde/errors.hpp"
#include "skyde/scenario.hpp"

namespace skyde {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* name : allowed) {
      if (key == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(std::string("unknown key \"") + key + "\" in " + where);
    }
  }
}

template <typename T>
void maybe(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

SizeSpec parse_size_spec(const json& j, const char* where) {
  check_keys(j, where, {"mean", "stddev", "min", "max"});
  SizeSpec s;
  s.mean = j.at("mean").get<double>();
  s.stddev = j.at("stddev").get<double>();
  s.min = j.at("min").get<int>();
  s.max = j.at("max").get<int>();
  return s;
}

json size_spec_to_json(const SizeSpec& s) {
  return {{"mean", s.mean}, {"stddev", s.stddev}, {"min", s.min}, {"max", s.max}};
}

TrafficProfile parse_profile(const json& j) {
  check_keys(j, "profile",
             {"mean_talkspurt_s", "mean_silence_s", "speech_ratio",
              "packet_rate", "silence_size", "voice_size",
              "signaling_fraction", "seed"});
  TrafficProfile p;
  maybe(j, "mean_talkspurt_s", p.mean_talkspurt_s);
  maybe(j, "mean_silence_s", p.mean_silence_s);
  if (j.contains("speech_ratio")) {
    const double ratio = j.at("speech_ratio").get<double>();
    if (j.contains("mean_silence_s")) {
      if (std::abs(p.speech_ratio() - ratio) > 1e-9) {
        throw ConfigError("speech_ratio disagrees with the segment means");
      }
    } else {
      p.set_speech_ratio(ratio);
    }
  }
  maybe(j, "packet_rate", p.packet_rate);
  if (j.contains("silence_size")) {
    p.silence_size = parse_size_spec(j.at("silence_size"), "silence_size");
  }
  if (j.contains("voice_size")) {
    p.voice_size = parse_size_spec(j.at("voice_size"), "voice_size");
  }
  maybe(j, "signaling_fraction", p.signaling_fraction);
  maybe(j, "seed", p.seed);
  return p;
}

json profile_to_json(const TrafficProfile& p) {
  return {
      {"mean_talkspurt_s", p.mean_talkspurt_s},
      {"mean_silence_s", p.mean_silence_s},
      {"packet_rate", p.packet_rate},
      {"silence_size", size_spec_to_json(p.silence_size)},
      {"voice_size", size_spec_to_json(p.voice_size)},
      {"signaling_fraction", p.signaling_fraction},
      {"seed", p.seed},
  };
}

ChannelConfig parse_channel(const json& j, const char* where) {
  check_keys(j, where, {"loss", "reorder", "seed"});
  ChannelConfig c;
  if (j.contains("loss")) {
    const json& loss = j.at("loss");
    const std::string type = loss.at("type").get<std::string>();
    if (type == "bernoulli") {
      check_keys(loss, "loss", {"type", "p"});
      BernoulliLoss b;
      maybe(loss, "p", b.p);
      c.loss = b;
    } else if (type == "gilbert_elliott") {
      check_keys(loss, "loss",
                 {"type", "p_good_to_bad", "p_bad_to_good", "loss_good",
                  "loss_bad"});
      GilbertElliottLoss ge;
      maybe(loss, "p_good_to_bad", ge.p_good_to_bad);
      maybe(loss, "p_bad_to_good", ge.p_bad_to_good);
      maybe(loss, "loss_good", ge.loss_good);
      maybe(loss, "loss_bad", ge.loss_bad);
      c.loss = ge;
    } else {
      throw ConfigError("unknown loss model: " + type);
    }
  }
  maybe(j, "reorder", c.reorder);
  maybe(j, "seed", c.seed);
  return c;
}

json channel_to_json(const ChannelConfig& c) {
  json loss;
  if (const auto* b = std::get_if<BernoulliLoss>(&c.loss)) {
    loss = {{"type", "bernoulli"}, {"p", b->p}};
  } else {
    const auto& ge = std::get<GilbertElliottLoss>(c.loss);
    loss = {{"type", "gilbert_elliott"},
            {"p_good_to_bad", ge.p_good_to_bad},
            {"p_bad_to_good", ge.p_bad_to_good},
            {"loss_good", ge.loss_good},
            {"loss_bad", ge.loss_bad}};
  }
  return {{"loss", loss}, {"reorder", c.reorder}, {"seed", c.seed}};
}

RateAdaptation parse_adaptation(const json& j) {
  check_keys(j, "adaptation",
             {"enabled", "period_s", "smoothing_windows", "tiers"});
  RateAdaptation a;
  maybe(j, "enabled", a.enabled);
  maybe(j, "period_s", a.period_s);
  maybe(j, "smoothing_windows", a.smoothing_windows);
  if (j.contains("tiers")) {
    a.tiers.clear();
    for (const json& t : j.at("tiers")) {
      check_keys(t, "tier", {"loss_threshold", "packet_rate", "size_factor"});
      AdaptationTier tier;
      tier.loss_threshold = t.at("loss_threshold").get<double>();
      tier.packet_rate = t.at("packet_rate").get<double>();
      maybe(t, "size_factor", tier.size_factor);
      a.tiers.push_back(tier);
    }
  }
  return a;
}

json adaptation_to_json(const RateAdaptation& a) {
  json tiers = json::array();
  for (const AdaptationTier& t : a.tiers) {
    tiers.push_back({{"loss_threshold", t.loss_threshold},
                     {"packet_rate", t.packet_rate},
                     {"size_factor", t.size_factor}});
  }
  return {{"enabled", a.enabled},
          {"period_s", a.period_s},
          {"smoothing_windows", a.smoothing_windows},
          {"tiers", tiers}};
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(j, "config",
               {"mode", "utilization", "duration_s", "seed",
                "governor_threshold", "profile", "channel", "tap_channel",
                "classifier", "adaptation", "keys", "secret"});
    ScenarioConfig cfg;
    if (j.contains("mode")) {
      const std::string mode = j.at("mode").get<std::string>();
      if (mode == "end_to_end") {
        cfg.mode = ScenarioMode::EndToEnd;
      } else if (mode == "third_party") {
        cfg.mode = ScenarioMode::ThirdParty;
      } else {
        throw ConfigError("unknown mode: " + mode);
      }
    }
    maybe(j, "utilization", cfg.utilization);
    maybe(j, "duration_s", cfg.duration_s);
    maybe(j, "seed", cfg.seed);
    maybe(j, "governor_threshold", cfg.governor_threshold);
    if (j.contains("profile")) cfg.profile = parse_profile(j.at("profile"));
    if (j.contains("channel")) {
      cfg.channel = parse_channel(j.at("channel"), "channel");
    }
    if (j.contains("tap_channel")) {
      cfg.tap_channel = parse_channel(j.at("tap_channel"), "tap_channel");
    }
    if (j.contains("classifier")) {
      const json& c = j.at("classifier");
      check_keys(c, "classifier", {"window_s", "delta_bytes"});
      maybe(c, "window_s", cfg.classifier.window_s);
      maybe(c, "delta_bytes", cfg.classifier.delta_bytes);
    }
    if (j.contains("adaptation")) {
      cfg.adaptation = parse_adaptation(j.at("adaptation"));
    }
    if (j.contains("keys")) {
      const json& k = j.at("keys");
      check_keys(k, "keys", {"key_hex", "nonce_hex"});
      cfg.keys = KeyMaterial::from_hex(k.at("key_hex").get<std::string>(),
                                       k.at("nonce_hex").get<std::string>());
    }
    if (j.contains("secret")) {
      const json& s = j.at("secret");
      check_keys(s, "secret", {"type", "seed", "length", "path"});
      const std::string type = s.at("type").get<std::string>();
      if (type == "random") {
        cfg.secret.type = SecretSpec::Type::Random;
        maybe(s, "seed", cfg.secret.seed);
        if (s.contains("length")) {
          cfg.secret.length = s.at("length").get<std::size_t>();
        }
      } else if (type == "file") {
        cfg.secret.type = SecretSpec::Type::File;
        cfg.secret.path = s.at("path").get<std::string>();
      } else {
        throw ConfigError("unknown secret type: " + type);
      }
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config schema mismatch: ") + e.what());
  }
}

ScenarioConfig ScenarioConfig::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return from_json_text(text.str());
}

std::string ScenarioConfig::to_json_text() const {
  json j = {
      {"mode", mode == ScenarioMode::EndToEnd ? "end_to_end" : "third_party"},
      {"utilization", utilization},
      {"duration_s", duration_s},
      {"seed", seed},
      {"governor_threshold", governor_threshold},
      {"profile", profile_to_json(profile)},
      {"channel", channel_to_json(channel)},
      {"tap_channel", channel_to_json(tap_channel)},
      {"classifier",
       {{"window_s", classifier.window_s},
        {"delta_bytes", classifier.delta_bytes}}},
      {"adaptation", adaptation_to_json(adaptation)},
  };
  if (keys) {
    j["keys"] = {{"key_hex", to_hex(keys->key)},
                 {"nonce_hex", to_hex(keys->call_nonce)}};
  }
  json s;
  if (secret.type == SecretSpec::Type::Random) {
    s = {{"type", "random"}, {"seed", secret.seed}};
    if (secret.length) s["length"] = *secret.length;
  } else {
    s = {{"type", "file"}, {"path", secret.path}};
  }
  j["secret"] = std::move(s);
  return j.dump(2);
}

}  // namespace skyde
