#include "skyde/classifier.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "skyde/errors.hpp"

namespace skyde {

void ClassifierConfig::validate() const {
  if (window_s < 3) {
    throw std::invalid_argument("window must be at least 3 seconds");
  }
  if (delta_bytes < 0.0) {
    throw std::invalid_argument("delta must be nonnegative");
  }
}

SilenceReference::SilenceReference(ClassifierConfig cfg) : cfg_(cfg) {
  cfg_.validate();
}

void SilenceReference::commit(std::size_t minimum) {
  minima_.push_back(minimum);
  while (minima_.size() > static_cast<std::size_t>(cfg_.window_s)) {
    minima_.pop_front();
  }
}

void SilenceReference::observe(std::size_t datagram_size, std::uint64_t ts_us) {
  if (!started_) {
    started_ = true;
    first_ts_us_ = ts_us;
    last_ts_us_ = ts_us;
    current_second_ = 0;
    current_min_ = datagram_size;
    return;
  }
  if (ts_us < last_ts_us_) {
    throw MonotonicityError("observation timestamps went backwards");
  }
  last_ts_us_ = ts_us;
  const std::uint64_t second = (ts_us - first_ts_us_) / 1'000'000;
  if (second > current_second_) {
    commit(current_min_);
    current_second_ = second;
    current_min_ = datagram_size;
  } else {
    current_min_ = std::min(current_min_, datagram_size);
  }
}

std::optional<double> SilenceReference::reference() const {
  if (minima_.size() < static_cast<std::size_t>(cfg_.window_s)) {
    return std::nullopt;
  }
  std::vector<std::size_t> sorted(minima_.begin(), minima_.end());
  std::partial_sort(sorted.begin(), sorted.begin() + ClassifierConfig::kLowest,
                    sorted.end());
  double sum = 0.0;
  for (int i = 0; i < ClassifierConfig::kLowest; ++i) {
    sum += static_cast<double>(sorted[i]);
  }
  return sum / ClassifierConfig::kLowest;
}

Classification SilenceReference::classify(std::size_t datagram_size) const {
  const std::optional<double> r = reference();
  if (!r) return Classification::Unknown;
  return static_cast<double>(datagram_size) <= *r + cfg_.delta_bytes
             ? Classification::Silence
             : Classification::Voice;
}

LossGovernor::LossGovernor(double threshold) : threshold_(threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("governor threshold must lie in (0, 1]");
  }
}

GovernorDecision LossGovernor::update(std::uint64_t sent,
                                      std::uint64_t unusable) {
  if (unusable > sent) {
    throw std::invalid_argument("unusable count exceeds sent count");
  }
  last_ratio_ = sent == 0 ? 0.0
                          : static_cast<double>(unusable) /
                                static_cast<double>(sent);
  active_ = last_ratio_ < threshold_;
  return active_ ? GovernorDecision::Allow : GovernorDecision::Suspend;
}

}  // namespace skyde
