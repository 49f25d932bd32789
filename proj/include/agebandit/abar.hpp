#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "agebandit/adwin.hpp"
#include "agebandit/policy.hpp"

namespace agebandit {

struct AbarConfig {
  std::size_t monitor_n = 16;            // N
  double delta_exponent = 3.0;           // delta = T_eff^-exponent unless fixed_delta is set
  std::optional<double> fixed_delta;
  double reward_cap = kDefaultRewardCap;  // C, shared with the detector
  bool monitor_counts_in_ucb = true;     // monitoring samples update mu-hat and T^(k)
  std::size_t min_subwindow = 1;
  std::size_t scan_stride = 1;

  void validate() const;
  /// Detector delta for an effective horizon.
  double delta_for(std::uint64_t effective_horizon) const;
};

struct BlockBounds {
  std::uint64_t first = 0;
  std::uint64_t last = 0;
  friend bool operator==(const BlockBounds&, const BlockBounds&) = default;
};

enum class SlotClass { kMonitorPrev, kMonitorCurr, kLearn };

/// Local slots [(2^(l-1) - 1) K N + 1, (2^l - 1) K N] of block l >= 1.
BlockBounds block_bounds(std::uint64_t block, std::size_t num_arms, std::size_t monitor_n);

/// Local slot t in block l: every K-th slot replays the previous block's
/// monitoring arm; in the final subblock the slot after each of those plays
/// the newly elected arm.
SlotClass classify_slot(std::uint64_t t_local, std::uint64_t block, std::size_t num_arms,
                        std::size_t monitor_n);

/// argmax_k mean_k + sqrt(2 log t / count_k); unplayed arms win first,
/// ties go to the lowest index.
std::size_t ucb_select(std::span<const double> means, std::span<const std::uint64_t> counts,
                       std::uint64_t t_local);

/// argmax_k non-monitoring count, lowest index on ties.
std::size_t select_monitoring_arm(std::span<const std::uint64_t> nonmon_counts);

struct AbarPairState {
  std::uint64_t t_local = 0;  // slots since the last reset, 1-based once a slot begins
  std::uint64_t effective_horizon = 0;
  std::uint64_t block = 1;
  std::optional<std::size_t> monitor_prev;  // i^(l-1)
  std::optional<std::size_t> monitor_curr;  // i^(l)
  std::vector<double> ucb_mean;             // normalized rewards
  std::vector<std::uint64_t> ucb_count;
  std::vector<std::uint64_t> nonmon_count;
  std::uint64_t resets = 0;
};

/// Aging bandit with adaptive reset, one instance per (client, server) pair.
class AbarPolicy : public RequestPolicy {
 public:
  AbarPolicy(std::size_t num_arms, std::uint64_t horizon, AbarConfig cfg = {});

  std::string_view name() const override { return "abar"; }
  AnIndex select(const PolicyObservation& obs, const WorldView* world) override;
  std::optional<std::uint64_t> observe(AnIndex arm, double raw_reward) override;
  void on_idle_slot(const PolicyObservation& obs) override;

  const AbarPairState& state() const noexcept { return state_; }
  const AdwinDetector& detector() const noexcept { return detector_; }
  const AbarConfig& config() const noexcept { return cfg_; }
  /// Class of the most recent selection.
  SlotClass last_class() const noexcept { return last_class_; }

 private:
  void begin_slot();
  void maybe_elect_monitor();
  void reset_statistics();

  AbarConfig cfg_;
  std::size_t num_arms_;
  AbarPairState state_;
  AdwinDetector detector_;
  SlotClass last_class_ = SlotClass::kLearn;
};

}  // namespace agebandit
