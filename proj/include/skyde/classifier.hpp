#pragma once

#include <cstdint>
#include <deque>
#include <optional>

namespace skyde {

struct ClassifierConfig {
  int window_s = 10;          // sliding window length w, whole seconds
  double delta_bytes = 20.0;  // size tolerance above the reference
  static constexpr int kLowest = 3;

  void validate() const;  // window_s >= 3, delta_bytes >= 0
};

enum class Classification : std::uint8_t { Silence, Voice, Unknown };

/// Sliding-window reference size estimator. Every call-relative second the
/// smallest datagram observed in that second is committed to a ring of w
/// entries; once the ring is full the reference r is the mean of the three
/// smallest entries. Feed it data packets only; callers keep signaling out.
class SilenceReference {
 public:
  explicit SilenceReference(ClassifierConfig cfg);

  /// Throws MonotonicityError if ts_us precedes the previous observation.
  /// Seconds with no observed packet commit nothing.
  void observe(std::size_t datagram_size, std::uint64_t ts_us);

  /// Mean of the three smallest per-second minima; empty during warm-up
  /// (fewer than w committed seconds). The fractional value is kept.
  std::optional<double> reference() const;

  /// Unknown during warm-up, else Silence iff size <= r + delta. The band is
  /// one-sided: a packet smaller than r is silence a fortiori.
  Classification classify(std::size_t datagram_size) const;

  const std::deque<std::size_t>& per_second_minima() const { return minima_; }

 private:
  void commit(std::size_t minimum);

  ClassifierConfig cfg_;
  std::deque<std::size_t> minima_;
  bool started_ = false;
  std::uint64_t first_ts_us_ = 0;
  std::uint64_t last_ts_us_ = 0;
  std::uint64_t current_second_ = 0;
  std::size_t current_min_ = 0;
};

enum class GovernorDecision : std::uint8_t { Allow, Suspend };

/// Suspends steganographic use of silence packets when the total fraction of
/// packets unusable by the overt receiver (channel losses plus embedded
/// packets) reaches the UDP survival ceiling. Evaluate once per window w.
class LossGovernor {
 public:
  explicit LossGovernor(double threshold = 0.70);

  /// Window totals in, decision out. sent == 0 counts as an idle window
  /// (ratio 0). Throws std::invalid_argument when unusable > sent.
  GovernorDecision update(std::uint64_t sent, std::uint64_t unusable);

  bool active() const { return active_; }
  double threshold() const { return threshold_; }
  double last_ratio() const { return last_ratio_; }

 private:
  double threshold_;
  double last_ratio_ = 0.0;
  bool active_ = true;
};

}  // namespace skyde
