#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "skyde/rng.hpp"
#include "skyde/traffic.hpp"

namespace skyde {

struct BernoulliLoss {
  double p = 0.0;
};

/// Two-state burst loss model. Each packet is dropped with the loss
/// probability of the current state; the state then transitions.
struct GilbertElliottLoss {
  double p_good_to_bad = 0.0;
  double p_bad_to_good = 1.0;
  double loss_good = 0.0;
  double loss_bad = 1.0;
};

using LossModel = std::variant<BernoulliLoss, GilbertElliottLoss>;

struct ChannelConfig {
  LossModel loss = BernoulliLoss{0.0};
  bool reorder = false;  // reserved; delivery order is preserved
  std::uint64_t seed = 0;

  void validate() const;  // all probabilities in [0, 1]
};

/// Per-packet drop decisions, deterministic given the config seed.
class Channel {
 public:
  explicit Channel(const ChannelConfig& cfg);

  /// True when the next packet survives the path.
  bool deliver();

 private:
  LossModel model_;
  Rng rng_;
  bool bad_state_ = false;
};

/// Filters a time-ordered packet sequence through the loss model.
std::vector<PacketRecord> transmit(std::span<const PacketRecord> packets,
                                   const ChannelConfig& cfg);

/// One rung of the overt application's reaction to loss: at or above
/// loss_threshold the call runs at packet_rate with sizes scaled by
/// size_factor.
struct AdaptationTier {
  double loss_threshold = 0.0;
  double packet_rate = 50.0;
  double size_factor = 1.0;
};

/// Piecewise adaptation law fitted to the measured operating points: full
/// rate below 15% observed loss, roughly half rate up to 35%, then the low
/// rate with ~29% size inflation. Observed loss is smoothed over
/// smoothing_windows evaluation periods before the law is applied, since the
/// raw per-period loss swings with the talkspurt process.
struct RateAdaptation {
  bool enabled = true;
  double period_s = 10.0;
  int smoothing_windows = 3;
  std::vector<AdaptationTier> tiers = {
      {0.00, 50.0, 1.00},
      {0.15, 24.0, 1.00},
      {0.35, 17.0, 1.29},
  };

  void validate() const;

  /// Maps an observed loss fraction to (packet_rate, size_factor).
  std::pair<double, double> adapt(double observed_loss) const;
};

/// The default law applied to a single observation; mirrors
/// RateAdaptation{}.adapt().
std::pair<double, double> adapt(double observed_loss);

}  // namespace skyde
