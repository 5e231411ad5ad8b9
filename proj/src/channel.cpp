#include "skyde/channel.hpp"

#include <stdexcept>
#include <string>

namespace skyde {

namespace {
void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}
}  // namespace

void ChannelConfig::validate() const {
  if (const auto* b = std::get_if<BernoulliLoss>(&loss)) {
    check_probability(b->p, "loss probability");
  } else {
    const auto& ge = std::get<GilbertElliottLoss>(loss);
    check_probability(ge.p_good_to_bad, "p_good_to_bad");
    check_probability(ge.p_bad_to_good, "p_bad_to_good");
    check_probability(ge.loss_good, "loss_good");
    check_probability(ge.loss_bad, "loss_bad");
  }
}

Channel::Channel(const ChannelConfig& cfg) : model_(cfg.loss), rng_(cfg.seed) {
  cfg.validate();
}

bool Channel::deliver() {
  if (const auto* b = std::get_if<BernoulliLoss>(&model_)) {
    return !rng_.bernoulli(b->p);
  }
  const auto& ge = std::get<GilbertElliottLoss>(model_);
  const bool dropped = rng_.bernoulli(bad_state_ ? ge.loss_bad : ge.loss_good);
  if (bad_state_) {
    if (rng_.bernoulli(ge.p_bad_to_good)) bad_state_ = false;
  } else {
    if (rng_.bernoulli(ge.p_good_to_bad)) bad_state_ = true;
  }
  return !dropped;
}

std::vector<PacketRecord> transmit(std::span<const PacketRecord> packets,
                                   const ChannelConfig& cfg) {
  Channel channel(cfg);
  std::vector<PacketRecord> delivered;
  delivered.reserve(packets.size());
  for (const PacketRecord& rec : packets) {
    if (channel.deliver()) delivered.push_back(rec);
  }
  return delivered;
}

void RateAdaptation::validate() const {
  if (tiers.empty()) throw std::invalid_argument("adaptation needs tiers");
  if (tiers.front().loss_threshold != 0.0) {
    throw std::invalid_argument("first tier must start at loss 0");
  }
  double prev = -1.0;
  for (const AdaptationTier& tier : tiers) {
    if (tier.loss_threshold <= prev || tier.loss_threshold > 1.0) {
      throw std::invalid_argument("tier thresholds must increase within [0, 1]");
    }
    if (!(tier.packet_rate > 0.0) || !(tier.size_factor >= 1.0)) {
      throw std::invalid_argument("tier rate must be positive, factor >= 1");
    }
    prev = tier.loss_threshold;
  }
  if (!(period_s > 0.0) || smoothing_windows < 1) {
    throw std::invalid_argument("bad adaptation period or smoothing");
  }
}

std::pair<double, double> RateAdaptation::adapt(double observed_loss) const {
  if (!(observed_loss >= 0.0 && observed_loss <= 1.0)) {
    throw std::invalid_argument("observed loss must lie in [0, 1]");
  }
  const AdaptationTier* chosen = &tiers.front();
  for (const AdaptationTier& tier : tiers) {
    if (observed_loss >= tier.loss_threshold) chosen = &tier;
  }
  return {chosen->packet_rate, chosen->size_factor};
}

std::pair<double, double> adapt(double observed_loss) {
  return RateAdaptation{}.adapt(observed_loss);
}

}  // namespace skyde
