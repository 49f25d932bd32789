#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace agebandit {

struct DetectorConfig {
  double delta = 1e-15;           // in (0, 1); usually 1 / T^3
  double scale = 1.0;             // rewards are divided by this and clipped to [0, 1]
  std::size_t min_subwindow = 1;  // per-arm samples required on each side of a split
  std::size_t scan_stride = 1;    // test every stride-th split of the pooled window

  /// Throws Error{kInvalidArgument} unless delta in (0,1), scale > 0, both counts >= 1.
  void validate() const;
};

/// Hoeffding cut threshold sqrt(log(1/delta) / 2 n1) + sqrt(log(1/delta) / 2 n2).
/// Throws Error{kZeroCount} when either count is zero.
double epsilon_cut(double delta, std::size_t n1, std::size_t n2);

struct WindowEntry {
  std::uint32_t arm = 0;
  double value = 0.0;  // normalized, in [0, 1]
};

/// Adaptive-window change detector over a pooled stream of arm-tagged
/// rewards. A change is flagged when, for some split of the window into an
/// older part W1 and a newer part W2 and some arm k, the arm-k means on the
/// two sides differ by at least epsilon_cut(delta, n1_k, n2_k).
///
/// With scan_stride == 1 every split is covered exactly, but splits are not
/// re-evaluated on every insertion: since W1 is fixed and each new sample
/// moves the W2 mean by at most 1 / (n2 + 1), a split whose gap is below
/// threshold by a slack s cannot fire until about s * n2 more samples of its
/// arm have arrived. Each split is parked in a min-heap keyed by the earliest
/// arm count at which it could fire. An insertion of arm k never changes the
/// outcome for any other arm, so only arm k's heap is consulted. The result
/// is identical to scanning all splits on every insertion.
///
/// Detection does not clear the window; callers decide when to reset().
class AdwinDetector {
 public:
  AdwinDetector(std::size_t num_arms, DetectorConfig cfg);

  /// Appends (arm, clip(raw_reward / scale, 0, 1)) and reports whether any
  /// split/arm of the resulting window exceeds its cut threshold.
  bool insert_and_check(std::size_t arm, double raw_reward);

  void reset();
  /// Reset and switch to a new configuration (e.g. a shorter horizon's delta).
  void reset(const DetectorConfig& cfg);

  const DetectorConfig& config() const noexcept { return cfg_; }
  std::size_t num_arms() const noexcept { return arms_.size(); }
  std::size_t window_size() const noexcept { return window_.size(); }
  std::span<const WindowEntry> window() const noexcept { return window_; }
  std::size_t arm_count(std::size_t arm) const { return arms_[arm].samples(); }
  double arm_sum(std::size_t arm) const { return arms_[arm].prefix.back(); }
  bool detected() const noexcept;

  /// Split evaluations performed since construction (cost accounting).
  std::uint64_t evaluations() const noexcept { return evaluations_; }

 private:
  struct Pending {
    std::uint64_t due;    // arm sample count at which to re-evaluate
    std::uint32_t split;  // number of arm samples in W1
    friend bool operator>(const Pending& a, const Pending& b) {
      return a.due != b.due ? a.due > b.due : a.split > b.split;
    }
  };

  struct ArmTrack {
    std::vector<double> prefix{0.0};          // prefix[i] = sum of first i samples
    std::vector<std::uint32_t> positions;     // pooled index of each sample
    std::vector<Pending> heap;                // min-heap on (due, split)
    bool fired = false;
    std::size_t samples() const noexcept { return prefix.size() - 1; }
  };

  // Returns true if split fires; otherwise parks it for its next due count.
  bool evaluate_split(ArmTrack& track, std::uint32_t split);
  bool rescan_arm(ArmTrack& track);
  bool scan_arm_pooled(std::size_t arm);
  void push(ArmTrack& track, Pending p);

  DetectorConfig cfg_;
  double log_inv_delta_ = 0.0;
  std::vector<WindowEntry> window_;
  std::vector<ArmTrack> arms_;
  std::uint64_t evaluations_ = 0;
};

}  // namespace agebandit
