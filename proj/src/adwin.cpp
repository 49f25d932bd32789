#include "agebandit/adwin.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "agebandit/error.hpp"

namespace agebandit {

namespace {

inline double cut_threshold(double log_inv_delta, double n1, double n2) {
  return std::sqrt(log_inv_delta / (2.0 * n1)) + std::sqrt(log_inv_delta / (2.0 * n2));
}

constexpr std::uint64_t kMaxDeferral = std::uint64_t{1} << 48;

}  // namespace

void DetectorConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "detector delta must lie in (0, 1)");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kInvalidArgument, "detector scale must be positive");
  }
  if (min_subwindow == 0 || scan_stride == 0) {
    throw Error(ErrorCode::kInvalidArgument, "min_subwindow and scan_stride must be >= 1");
  }
}

double epsilon_cut(double delta, std::size_t n1, std::size_t n2) {
  if (n1 == 0 || n2 == 0) {
    throw Error(ErrorCode::kZeroCount, "epsilon_cut needs n1 >= 1 and n2 >= 1");
  }
  return cut_threshold(std::log(1.0 / delta), static_cast<double>(n1), static_cast<double>(n2));
}

AdwinDetector::AdwinDetector(std::size_t num_arms, DetectorConfig cfg) : arms_(num_arms) {
  if (num_arms == 0) throw Error(ErrorCode::kZeroDimension, "detector needs at least one arm");
  reset(cfg);
}

void AdwinDetector::reset() {
  window_.clear();
  for (auto& track : arms_) track = ArmTrack{};
}

void AdwinDetector::reset(const DetectorConfig& cfg) {
  cfg.validate();
  cfg_ = cfg;
  log_inv_delta_ = std::log(1.0 / cfg_.delta);
  reset();
}

bool AdwinDetector::detected() const noexcept {
  return std::any_of(arms_.begin(), arms_.end(), [](const ArmTrack& t) { return t.fired; });
}

void AdwinDetector::push(ArmTrack& track, Pending p) {
  track.heap.push_back(p);
  std::push_heap(track.heap.begin(), track.heap.end(), std::greater<>{});
}

bool AdwinDetector::evaluate_split(ArmTrack& track, std::uint32_t split) {
  ++evaluations_;
  const std::size_t n = track.samples();
  const double n1 = static_cast<double>(split);
  const double n2 = static_cast<double>(n - split);
  const double mean1 = track.prefix[split] / n1;
  const double mean2 = (track.prefix[n] - track.prefix[split]) / n2;
  const double gap = std::abs(mean1 - mean2);
  const double threshold = cut_threshold(log_inv_delta_, n1, n2);
  if (gap >= threshold) return true;

  // m more samples move the W2 mean by at most m / (n2 + m) <= m / n2 and
  // lower the threshold by at most m * c / (2 n2^1.5), c = sqrt(log(1/delta)/2).
  const double c = std::sqrt(0.5 * log_inv_delta_);
  const double rate = 1.0 / n2 + c / (2.0 * n2 * std::sqrt(n2));
  const double steps = std::floor((threshold - gap) / rate * (1.0 - 1e-9));
  std::uint64_t defer = 1;
  if (steps >= static_cast<double>(kMaxDeferral)) {
    defer = kMaxDeferral;
  } else if (steps > 1.0) {
    defer = static_cast<std::uint64_t>(steps);
  }
  push(track, {static_cast<std::uint64_t>(n) + defer, split});
  return false;
}

bool AdwinDetector::rescan_arm(ArmTrack& track) {
  track.heap.clear();
  const std::size_t n = track.samples();
  const std::size_t m = cfg_.min_subwindow;
  for (std::size_t split = m; split + m <= n; ++split) {
    if (evaluate_split(track, static_cast<std::uint32_t>(split))) {
      track.heap.clear();
      return true;
    }
  }
  return false;
}

bool AdwinDetector::scan_arm_pooled(std::size_t arm) {
  const ArmTrack& track = arms_[arm];
  const std::size_t n = track.samples();
  const std::size_t m = cfg_.min_subwindow;
  std::size_t in_w1 = 0;
  for (std::size_t split = cfg_.scan_stride; split < window_.size(); split += cfg_.scan_stride) {
    while (in_w1 < n && track.positions[in_w1] < split) ++in_w1;
    if (in_w1 < m || n - in_w1 < m) continue;
    ++evaluations_;
    const double n1 = static_cast<double>(in_w1);
    const double n2 = static_cast<double>(n - in_w1);
    const double mean1 = track.prefix[in_w1] / n1;
    const double mean2 = (track.prefix[n] - track.prefix[in_w1]) / n2;
    if (std::abs(mean1 - mean2) >= cut_threshold(log_inv_delta_, n1, n2)) return true;
  }
  return false;
}

bool AdwinDetector::insert_and_check(std::size_t arm, double raw_reward) {
  if (arm >= arms_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "arm " + std::to_string(arm) + " out of range");
  }
  const double value = std::clamp(raw_reward / cfg_.scale, 0.0, 1.0);
  ArmTrack& track = arms_[arm];
  track.positions.push_back(static_cast<std::uint32_t>(window_.size()));
  window_.push_back({static_cast<std::uint32_t>(arm), value});
  track.prefix.push_back(track.prefix.back() + value);

  // Other arms' per-arm splits are untouched by this sample, so their
  // previous verdicts stand.
  if (cfg_.scan_stride != 1) {
    track.fired = scan_arm_pooled(arm);
    return detected();
  }
  if (track.fired) {
    track.fired = rescan_arm(track);
    return detected();
  }

  const std::size_t n = track.samples();
  const std::size_t m = cfg_.min_subwindow;
  bool fired = false;
  if (n >= 2 * m) fired = evaluate_split(track, static_cast<std::uint32_t>(n - m));
  while (!fired && !track.heap.empty() && track.heap.front().due <= n) {
    std::pop_heap(track.heap.begin(), track.heap.end(), std::greater<>{});
    const Pending next = track.heap.back();
    track.heap.pop_back();
    fired = evaluate_split(track, next.split);
  }
  track.fired = fired;
  return detected();
}

}  // namespace agebandit
