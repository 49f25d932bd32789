#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "agebandit/policy.hpp"
#include "agebandit/rng.hpp"

namespace agebandit {

struct DiscountedUcbConfig {
  double discount = 0.99;  // gamma_d in (0, 1]
  double xi = 0.6;
  double reward_cap = kDefaultRewardCap;

  /// gamma_d = 1 - 1 / (4 sqrt(T)).
  static DiscountedUcbConfig for_horizon(std::uint64_t horizon,
                                         double reward_cap = kDefaultRewardCap);
};

/// Discounted UCB: all arms' statistics decay by gamma_d on every observation.
class DiscountedUcbPolicy : public RequestPolicy {
 public:
  DiscountedUcbPolicy(std::size_t num_arms, DiscountedUcbConfig cfg);

  std::string_view name() const override { return "ducb"; }
  AnIndex select(const PolicyObservation& obs, const WorldView* world) override;
  std::optional<std::uint64_t> observe(AnIndex arm, double raw_reward) override;

  const std::vector<double>& discounted_sum() const noexcept { return sum_; }
  const std::vector<double>& discounted_count() const noexcept { return count_; }
  double discounted_mean(std::size_t arm) const { return sum_[arm] / count_[arm]; }

 private:
  DiscountedUcbConfig cfg_;
  std::vector<double> sum_;
  std::vector<double> count_;
};

struct SlidingWindowUcbConfig {
  std::size_t window = 1000;  // tau
  double xi = 0.6;
  double reward_cap = kDefaultRewardCap;

  /// tau = ceil(4 sqrt(T log T)).
  static SlidingWindowUcbConfig for_horizon(std::uint64_t horizon,
                                            double reward_cap = kDefaultRewardCap);
};

/// Sliding-window UCB over the last tau observations of the pair.
class SlidingWindowUcbPolicy : public RequestPolicy {
 public:
  SlidingWindowUcbPolicy(std::size_t num_arms, SlidingWindowUcbConfig cfg);

  std::string_view name() const override { return "swucb"; }
  AnIndex select(const PolicyObservation& obs, const WorldView* world) override;
  std::optional<std::uint64_t> observe(AnIndex arm, double raw_reward) override;

  std::uint64_t windowed_count(std::size_t arm) const { return count_[arm]; }
  double windowed_mean(std::size_t arm) const;

 private:
  struct Sample {
    std::uint32_t arm;
    double value;
  };
  SlidingWindowUcbConfig cfg_;
  std::deque<Sample> window_;
  std::vector<double> sum_;
  std::vector<std::uint64_t> count_;
  std::uint64_t observations_ = 0;
};

/// Centralized benchmark: argmax of the closed-form expected reward.
class OraclePolicy : public RequestPolicy {
 public:
  std::string_view name() const override { return "oracle"; }
  Visibility visibility() const override { return Visibility::kFullState; }
  AnIndex select(const PolicyObservation& obs, const WorldView* world) override;
  std::optional<std::uint64_t> observe(AnIndex, double) override { return std::nullopt; }
};

/// argmax_k expected_reward(world, k), lowest index on ties.
AnIndex oracle_select(const WorldView& world);

class RandomPolicy : public RequestPolicy {
 public:
  RandomPolicy(std::size_t num_arms, Rng rng) : num_arms_(num_arms), rng_(std::move(rng)) {}

  std::string_view name() const override { return "random"; }
  AnIndex select(const PolicyObservation& obs, const WorldView* world) override;
  std::optional<std::uint64_t> observe(AnIndex, double) override { return std::nullopt; }

 private:
  std::size_t num_arms_;
  Rng rng_;
};

inline AnIndex random_select(Rng& rng, std::size_t num_arms) {
  return static_cast<AnIndex>(uniform_index(rng, num_arms));
}

}  // namespace agebandit
