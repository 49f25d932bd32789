#include "agebandit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agebandit/error.hpp"

namespace agebandit {

namespace {

double normalize(double raw, double cap) { return std::clamp(raw / cap, 0.0, 1.0); }

}  // namespace

DiscountedUcbConfig DiscountedUcbConfig::for_horizon(std::uint64_t horizon, double reward_cap) {
  DiscountedUcbConfig cfg;
  cfg.discount = 1.0 - 1.0 / (4.0 * std::sqrt(static_cast<double>(horizon)));
  cfg.reward_cap = reward_cap;
  return cfg;
}

DiscountedUcbPolicy::DiscountedUcbPolicy(std::size_t num_arms, DiscountedUcbConfig cfg)
    : cfg_(cfg), sum_(num_arms, 0.0), count_(num_arms, 0.0) {
  if (!(cfg_.discount > 0.0 && cfg_.discount <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "D-UCB discount must lie in (0, 1]");
  }
}

AnIndex DiscountedUcbPolicy::select(const PolicyObservation&, const WorldView*) {
  double total = 0.0;
  for (std::size_t k = 0; k < count_.size(); ++k) {
    if (count_[k] == 0.0) return static_cast<AnIndex>(k);
    total += count_[k];
  }
  const double log_n = std::log(std::max(total, 1.0));
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count_.size(); ++k) {
    const double index = sum_[k] / count_[k] + 2.0 * std::sqrt(cfg_.xi * log_n / count_[k]);
    if (index > best_index) {
      best_index = index;
      best = k;
    }
  }
  return static_cast<AnIndex>(best);
}

std::optional<std::uint64_t> DiscountedUcbPolicy::observe(AnIndex arm, double raw_reward) {
  for (std::size_t k = 0; k < sum_.size(); ++k) {
    sum_[k] *= cfg_.discount;
    count_[k] *= cfg_.discount;
  }
  sum_[arm] += normalize(raw_reward, cfg_.reward_cap);
  count_[arm] += 1.0;
  return std::nullopt;
}

SlidingWindowUcbConfig SlidingWindowUcbConfig::for_horizon(std::uint64_t horizon,
                                                           double reward_cap) {
  SlidingWindowUcbConfig cfg;
  const double t = static_cast<double>(std::max<std::uint64_t>(horizon, 2));
  cfg.window = static_cast<std::size_t>(std::ceil(4.0 * std::sqrt(t * std::log(t))));
  cfg.reward_cap = reward_cap;
  return cfg;
}

SlidingWindowUcbPolicy::SlidingWindowUcbPolicy(std::size_t num_arms, SlidingWindowUcbConfig cfg)
    : cfg_(cfg), sum_(num_arms, 0.0), count_(num_arms, 0) {
  if (cfg_.window == 0) throw Error(ErrorCode::kInvalidArgument, "SW-UCB window must be >= 1");
}

double SlidingWindowUcbPolicy::windowed_mean(std::size_t arm) const {
  return count_[arm] == 0 ? 0.0 : sum_[arm] / static_cast<double>(count_[arm]);
}

AnIndex SlidingWindowUcbPolicy::select(const PolicyObservation&, const WorldView*) {
  const std::uint64_t round = observations_ + 1;
  const double log_t =
      std::log(static_cast<double>(std::min<std::uint64_t>(round, cfg_.window)));
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count_.size(); ++k) {
    if (count_[k] == 0) return static_cast<AnIndex>(k);
    const double n = static_cast<double>(count_[k]);
    const double index = sum_[k] / n + 2.0 * std::sqrt(cfg_.xi * log_t / n);
    if (index > best_index) {
      best_index = index;
      best = k;
    }
  }
  return static_cast<AnIndex>(best);
}

std::optional<std::uint64_t> SlidingWindowUcbPolicy::observe(AnIndex arm, double raw_reward) {
  const double value = normalize(raw_reward, cfg_.reward_cap);
  window_.push_back({arm, value});
  sum_[arm] += value;
  count_[arm] += 1;
  if (window_.size() > cfg_.window) {
    const Sample old = window_.front();
    window_.pop_front();
    count_[old.arm] -= 1;
    sum_[old.arm] = count_[old.arm] == 0 ? 0.0 : sum_[old.arm] - old.value;
  }
  observations_ += 1;
  return std::nullopt;
}

AnIndex oracle_select(const WorldView& world) {
  AnIndex best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (AnIndex k = 0; k < world.config.num_ans; ++k) {
    const double value = expected_reward(world.state, world.config, world.client, world.server, k);
    if (value > best_value) {
      best_value = value;
      best = k;
    }
  }
  return best;
}

AnIndex OraclePolicy::select(const PolicyObservation&, const WorldView* world) {
  if (world == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "oracle policy requires a world view");
  }
  return oracle_select(*world);
}

AnIndex RandomPolicy::select(const PolicyObservation&, const WorldView*) {
  return random_select(rng_, num_arms_);
}

}  // namespace agebandit
