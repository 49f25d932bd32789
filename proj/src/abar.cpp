#include "agebandit/abar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agebandit/error.hpp"

namespace agebandit {

void AbarConfig::validate() const {
  if (monitor_n == 0) throw Error(ErrorCode::kInvalidArgument, "monitoring parameter N must be >= 1");
  if (!(reward_cap > 0.0)) throw Error(ErrorCode::kInvalidArgument, "reward cap C must be positive");
  if (fixed_delta && !(*fixed_delta > 0.0 && *fixed_delta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta must lie in (0, 1)");
  }
  if (!fixed_delta && !(delta_exponent > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta exponent must be positive");
  }
}

double AbarConfig::delta_for(std::uint64_t effective_horizon) const {
  if (fixed_delta) return *fixed_delta;
  const double horizon = static_cast<double>(std::max<std::uint64_t>(effective_horizon, 2));
  return std::pow(horizon, -delta_exponent);
}

BlockBounds block_bounds(std::uint64_t block, std::size_t num_arms, std::size_t monitor_n) {
  const std::uint64_t kn = static_cast<std::uint64_t>(num_arms) * monitor_n;
  const std::uint64_t half = std::uint64_t{1} << (block - 1);
  return {(half - 1) * kn + 1, (2 * half - 1) * kn};
}

SlotClass classify_slot(std::uint64_t t_local, std::uint64_t block, std::size_t num_arms,
                        std::size_t monitor_n) {
  if (block < 2) return SlotClass::kLearn;
  const std::uint64_t kn = static_cast<std::uint64_t>(num_arms) * monitor_n;
  if (t_local % num_arms == 0) return SlotClass::kMonitorPrev;
  const std::uint64_t final_subblock = ((std::uint64_t{1} << block) - 2) * kn + 1;
  if (t_local % num_arms == 1 && t_local >= final_subblock) return SlotClass::kMonitorCurr;
  return SlotClass::kLearn;
}

std::size_t ucb_select(std::span<const double> means, std::span<const std::uint64_t> counts,
                       std::uint64_t t_local) {
  const double log_t = std::log(static_cast<double>(std::max<std::uint64_t>(t_local, 1)));
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) return k;
    const double index = means[k] + std::sqrt(2.0 * log_t / static_cast<double>(counts[k]));
    if (index > best_index) {
      best_index = index;
      best = k;
    }
  }
  return best;
}

std::size_t select_monitoring_arm(std::span<const std::uint64_t> nonmon_counts) {
  return static_cast<std::size_t>(
      std::max_element(nonmon_counts.begin(), nonmon_counts.end()) - nonmon_counts.begin());
}

namespace {

DetectorConfig detector_config(const AbarConfig& cfg, std::uint64_t effective_horizon) {
  DetectorConfig d;
  d.delta = cfg.delta_for(effective_horizon);
  d.scale = cfg.reward_cap;
  d.min_subwindow = cfg.min_subwindow;
  d.scan_stride = cfg.scan_stride;
  return d;
}

}  // namespace

AbarPolicy::AbarPolicy(std::size_t num_arms, std::uint64_t horizon, AbarConfig cfg)
    : cfg_((cfg.validate(), cfg)),
      num_arms_(num_arms),
      detector_(num_arms, detector_config(cfg_, horizon)) {
  state_.effective_horizon = horizon;
  reset_statistics();
}

void AbarPolicy::reset_statistics() {
  state_.t_local = 0;
  state_.block = 1;
  state_.monitor_prev.reset();
  state_.monitor_curr.reset();
  state_.ucb_mean.assign(num_arms_, 0.0);
  state_.ucb_count.assign(num_arms_, 0);
  state_.nonmon_count.assign(num_arms_, 0);
  detector_.reset(detector_config(cfg_, state_.effective_horizon));
}

void AbarPolicy::begin_slot() {
  state_.t_local += 1;
  while (state_.t_local > block_bounds(state_.block, num_arms_, cfg_.monitor_n).last) {
    state_.block += 1;
    // The elected arm of the finished block becomes the replayed one. If the
    // election never ran (horizon clamp), the last elected arm carries over.
    state_.monitor_prev = state_.monitor_curr;
  }
}

void AbarPolicy::maybe_elect_monitor() {
  const std::uint64_t kn = static_cast<std::uint64_t>(num_arms_) * cfg_.monitor_n;
  const std::uint64_t t = state_.t_local;
  const bool end_of_first_block = t == kn;
  const bool before_final_subblock =
      state_.block >= 2 && t == ((std::uint64_t{1} << state_.block) - 2) * kn;
  if (end_of_first_block || before_final_subblock) {
    state_.monitor_curr = select_monitoring_arm(state_.nonmon_count);
  }
}

AnIndex AbarPolicy::select(const PolicyObservation& /*obs*/, const WorldView* /*world*/) {
  begin_slot();
  const SlotClass cls = classify_slot(state_.t_local, state_.block, num_arms_, cfg_.monitor_n);
  if (cls == SlotClass::kMonitorPrev && state_.monitor_prev) {
    last_class_ = cls;
    return static_cast<AnIndex>(*state_.monitor_prev);
  }
  if (cls == SlotClass::kMonitorCurr && state_.monitor_curr) {
    last_class_ = cls;
    return static_cast<AnIndex>(*state_.monitor_curr);
  }
  last_class_ = SlotClass::kLearn;
  const std::size_t arm = ucb_select(state_.ucb_mean, state_.ucb_count, state_.t_local);
  state_.nonmon_count[arm] += 1;
  return static_cast<AnIndex>(arm);
}

std::optional<std::uint64_t> AbarPolicy::observe(AnIndex arm, double raw_reward) {
  if (last_class_ == SlotClass::kLearn || cfg_.monitor_counts_in_ucb) {
    const double value = std::clamp(raw_reward / cfg_.reward_cap, 0.0, 1.0);
    auto& count = state_.ucb_count[arm];
    auto& mean = state_.ucb_mean[arm];
    count += 1;
    mean += (value - mean) / static_cast<double>(count);
  }
  if (detector_.insert_and_check(arm, raw_reward)) {
    const std::uint64_t at = state_.t_local;
    state_.effective_horizon =
        state_.effective_horizon > at ? state_.effective_horizon - at : 1;
    state_.resets += 1;
    reset_statistics();
    return at;
  }
  maybe_elect_monitor();
  return std::nullopt;
}

void AbarPolicy::on_idle_slot(const PolicyObservation& /*obs*/) {
  begin_slot();
  maybe_elect_monitor();
}

}  // namespace agebandit
