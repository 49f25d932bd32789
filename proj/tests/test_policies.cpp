#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <deque>
#include <vector>

#include "agebandit/abar.hpp"
#include "agebandit/baselines.hpp"
#include "agebandit/error.hpp"
#include "agebandit/rng.hpp"
#include "test_support.hpp"

using namespace agebandit;
using agebandit::testing::column;

namespace {

PolicyObservation no_obs() { return {}; }

// Drives a policy with reward_of(arm, slot) for `slots` slots; returns choices.
template <typename Reward>
std::vector<AnIndex> drive(RequestPolicy& policy, std::size_t slots, Reward&& reward_of,
                           std::vector<std::uint64_t>* resets = nullptr) {
  std::vector<AnIndex> chosen;
  for (std::size_t t = 0; t < slots; ++t) {
    const AnIndex arm = policy.select(no_obs(), nullptr);
    chosen.push_back(arm);
    if (auto r = policy.observe(arm, reward_of(arm, t)); r && resets) resets->push_back(t);
  }
  return chosen;
}

}  // namespace

TEST(BlockBounds, SmallCases) {
  EXPECT_EQ(block_bounds(1, 3, 2), (BlockBounds{1, 6}));
  EXPECT_EQ(block_bounds(2, 3, 2), (BlockBounds{7, 18}));
  EXPECT_EQ(block_bounds(3, 3, 2), (BlockBounds{19, 42}));
}

TEST(BlockBounds, ContiguousAndDoubling) {
  for (std::size_t k : {1, 2, 3, 5}) {
    for (std::size_t n : {1, 2, 4, 16}) {
      std::uint64_t next = 1;
      for (std::uint64_t l = 1; l < 12; ++l) {
        const auto b = block_bounds(l, k, n);
        EXPECT_EQ(b.first, next);
        EXPECT_EQ(b.last - b.first + 1, (std::uint64_t{1} << (l - 1)) * k * n);
        next = b.last + 1;
      }
    }
  }
}

TEST(ClassifySlot, SecondBlock) {
  for (std::uint64_t t : {9, 12, 15, 18}) EXPECT_EQ(classify_slot(t, 2, 3, 2), SlotClass::kMonitorPrev);
  for (std::uint64_t t : {13, 16}) EXPECT_EQ(classify_slot(t, 2, 3, 2), SlotClass::kMonitorCurr);
  for (std::uint64_t t : {7, 8, 10, 11, 14, 17}) EXPECT_EQ(classify_slot(t, 2, 3, 2), SlotClass::kLearn);
  for (std::uint64_t t = 1; t <= 6; ++t) EXPECT_EQ(classify_slot(t, 1, 3, 2), SlotClass::kLearn);
}

TEST(UcbSelect, WorkedExamples) {
  const std::array<double, 2> zero_means{0.0, 0.0};
  const std::array<std::uint64_t, 2> zero_counts{0, 0};
  EXPECT_EQ(ucb_select(zero_means, zero_counts, 1), 0u);

  const double bonus100 = std::sqrt(2.0 * std::log(1000.0) / 100.0);
  const double bonus4 = std::sqrt(2.0 * std::log(1000.0) / 4.0);
  EXPECT_NEAR(0.9 + bonus100, 1.2717, 1e-4);
  EXPECT_NEAR(bonus4, 1.858, 1e-3);

  const std::array<double, 2> m1{0.9, 0.1};
  const std::array<std::uint64_t, 2> c1{100, 100};
  EXPECT_EQ(ucb_select(m1, c1, 1000), 0u);
  const std::array<double, 2> m2{0.2, 0.2};
  const std::array<std::uint64_t, 2> c2{4, 100};
  EXPECT_EQ(ucb_select(m2, c2, 1000), 0u);
  const std::array<std::uint64_t, 2> c3{100, 4};
  EXPECT_EQ(ucb_select(m2, c3, 1000), 1u);
}

TEST(SelectMonitoringArm, Ties) {
  EXPECT_EQ(select_monitoring_arm(std::array<std::uint64_t, 3>{5, 9, 9}), 1u);
  EXPECT_EQ(select_monitoring_arm(std::array<std::uint64_t, 3>{0, 0, 0}), 0u);
  EXPECT_EQ(select_monitoring_arm(std::array<std::uint64_t, 3>{3, 7, 2}), 1u);
}

TEST(Abar, FreshStateExploresArmZero) {
  AbarPolicy abar(3, 1000, {});
  EXPECT_EQ(abar.select(no_obs(), nullptr), 0u);
  EXPECT_EQ(abar.state().t_local, 1u);
  EXPECT_EQ(abar.last_class(), SlotClass::kLearn);
}

TEST(Abar, MonitoringOverridesUcb) {
  AbarConfig cfg;
  cfg.monitor_n = 2;
  cfg.reward_cap = 1.0;
  AbarPolicy abar(3, 1000, cfg);
  // Arm 2 always pays; it wins block 1's election.
  drive(abar, 8, [](AnIndex arm, std::size_t) { return arm == 2 ? 1.0 : 0.0; });
  ASSERT_EQ(abar.state().block, 2u);
  ASSERT_EQ(abar.state().monitor_prev, std::optional<std::size_t>(2));
  EXPECT_EQ(abar.select(no_obs(), nullptr), 2u);
  EXPECT_EQ(abar.state().t_local, 9u);
  EXPECT_EQ(abar.last_class(), SlotClass::kMonitorPrev);
}

TEST(Abar, PreviousMonitorPlayedNTimesPerSubblock) {
  const std::size_t k = 3, n = 2;
  AbarConfig cfg;
  cfg.monitor_n = n;
  cfg.reward_cap = 1.0;
  AbarPolicy abar(k, 1000, cfg);
  std::vector<std::size_t> per_subblock(2, 0);
  for (std::uint64_t t = 1; t <= 18; ++t) {
    const AnIndex arm = abar.select(no_obs(), nullptr);
    if (t >= 7 && abar.last_class() == SlotClass::kMonitorPrev && abar.state().monitor_prev &&
        arm == *abar.state().monitor_prev) {
      per_subblock[(t - 7) / (k * n)] += 1;
    }
    abar.observe(arm, 0.5);
  }
  EXPECT_EQ(per_subblock[0], n);
  EXPECT_EQ(per_subblock[1], n);
}

TEST(Abar, EffectiveHorizonShrinksOnReset) {
  AbarConfig cfg;
  cfg.fixed_delta = 0.5;
  cfg.reward_cap = 1.0;
  AbarPolicy abar(1, 10000, cfg);
  for (int t = 1; t < 500; ++t) {
    const AnIndex arm = abar.select(no_obs(), nullptr);
    ASSERT_FALSE(abar.observe(arm, 0.0).has_value());
  }
  const AnIndex arm = abar.select(no_obs(), nullptr);
  const auto reset = abar.observe(arm, 1.0);
  ASSERT_TRUE(reset.has_value());
  EXPECT_EQ(*reset, 500u);
  EXPECT_EQ(abar.state().effective_horizon, 9500u);
  EXPECT_EQ(abar.state().resets, 1u);
}

TEST(Abar, PostResetStateIsFresh) {
  AbarConfig cfg;
  cfg.reward_cap = 1.0;
  cfg.monitor_n = 2;
  AbarPolicy abar(3, 20000, cfg);
  std::vector<std::uint64_t> resets;
  // Arm values swap at slot 3000.
  bool checked = false;
  for (std::size_t t = 0; t < 20000 && !checked; ++t) {
    const AnIndex arm = abar.select(no_obs(), nullptr);
    const double value = t < 3000 ? (arm == 2 ? 1.0 : 0.0) : (arm == 0 ? 1.0 : 0.0);
    if (abar.observe(arm, value)) {
      const auto& s = abar.state();
      EXPECT_EQ(s.t_local, 0u);
      EXPECT_EQ(s.block, 1u);
      EXPECT_FALSE(s.monitor_prev.has_value());
      EXPECT_FALSE(s.monitor_curr.has_value());
      for (std::size_t a = 0; a < 3; ++a) {
        EXPECT_EQ(s.ucb_count[a], 0u);
        EXPECT_EQ(s.nonmon_count[a], 0u);
        EXPECT_EQ(s.ucb_mean[a], 0.0);
      }
      EXPECT_EQ(abar.detector().window_size(), 0u);
      EXPECT_EQ(s.effective_horizon, 20000 - (t + 1));
      EXPECT_GT(t, 3000u);
      // Forced exploration restarts in index order.
      for (AnIndex expect = 0; expect < 3; ++expect) {
        const AnIndex a = abar.select(no_obs(), nullptr);
        EXPECT_EQ(a, expect);
        abar.observe(a, 0.5);
      }
      checked = true;
    }
  }
  EXPECT_TRUE(checked);
}

TEST(Abar, StationaryStreamRarelyResets) {
  std::size_t seeds_with_reset = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng = make_substream(seed, StreamDomain::kTest, 11);
    AbarConfig cfg;
    cfg.reward_cap = 1.0;
    AbarPolicy abar(3, 10000, cfg);
    const std::array<double, 3> p{0.2, 0.5, 0.7};
    bool any = false;
    for (int t = 0; t < 10000; ++t) {
      const AnIndex arm = abar.select(no_obs(), nullptr);
      any |= abar.observe(arm, bernoulli(rng, p[arm]) ? 1.0 : 0.0).has_value();
    }
    seeds_with_reset += any;
  }
  EXPECT_LE(seeds_with_reset, 5u);
}

TEST(Abar, CountInvariantsWithIdleSlots) {
  AbarConfig cfg;
  cfg.monitor_n = 3;
  AbarPolicy abar(3, 5000, cfg);
  Rng rng = make_substream(1, StreamDomain::kTest, 12);
  std::uint64_t idle = 0;
  for (int t = 0; t < 5000; ++t) {
    if (bernoulli(rng, 0.3)) {
      abar.on_idle_slot(no_obs());
      ++idle;
    } else {
      const AnIndex arm = abar.select(no_obs(), nullptr);
      abar.observe(arm, static_cast<double>(arm));
    }
  }
  const auto& s = abar.state();
  ASSERT_EQ(s.resets, 0u);
  std::uint64_t total = 0;
  for (std::size_t a = 0; a < 3; ++a) {
    total += s.ucb_count[a];
    EXPECT_LE(s.nonmon_count[a], s.ucb_count[a]);
  }
  EXPECT_EQ(total, s.t_local - idle);
}

TEST(Abar, ReplayIsDeterministic) {
  auto reward = [](AnIndex arm, std::size_t t) {
    return static_cast<double>((arm * 7 + t * 13) % 6);
  };
  AbarPolicy a(3, 5000, {});
  AbarPolicy b(3, 5000, {});
  EXPECT_EQ(drive(a, 5000, reward), drive(b, 5000, reward));
}

TEST(Abar, ArgmaxInvariantUnderCommonScaling) {
  AbarConfig small;
  small.reward_cap = 4.0;
  AbarConfig big;
  big.reward_cap = 64.0;
  AbarPolicy a(3, 5000, small);
  AbarPolicy b(3, 5000, big);
  Rng ra = make_substream(2, StreamDomain::kTest, 13);
  Rng rb = make_substream(2, StreamDomain::kTest, 13);
  auto reward_a = [&](AnIndex arm, std::size_t) { return 4.0 * uniform01(ra) * (arm + 1) / 3.0; };
  auto reward_b = [&](AnIndex arm, std::size_t) { return 64.0 * uniform01(rb) * (arm + 1) / 3.0; };
  EXPECT_EQ(drive(a, 5000, reward_a), drive(b, 5000, reward_b));
}

TEST(AbarConfig, Validation) {
  AbarConfig cfg;
  cfg.monitor_n = 0;
  EXPECT_THROW(AbarPolicy(3, 100, cfg), Error);
  cfg = {};
  cfg.fixed_delta = 1.0;
  EXPECT_THROW(AbarPolicy(3, 100, cfg), Error);
  cfg = {};
  EXPECT_DOUBLE_EQ(cfg.delta_for(100), 1e-6);
}

namespace {

WorldState world(Age h, std::initializer_list<Age> g) {
  WorldState s;
  s.client_age = Matrix<Age>(1, 1, h);
  s.an_age = Matrix<Age>(g.size(), 1);
  std::size_t k = 0;
  for (Age a : g) s.an_age(k++, 0) = a;
  return s;
}

}  // namespace

TEST(Oracle, WorkedExample) {
  const auto cfg = make_network(1, column({0.1, 0.4, 0.7}), 10);
  const auto state = world(5, {3, 3, 3});
  EXPECT_NEAR(expected_reward(state, cfg, 0, 0, 0), 2.3, 1e-12);
  EXPECT_NEAR(expected_reward(state, cfg, 0, 0, 1), 3.2, 1e-12);
  EXPECT_NEAR(expected_reward(state, cfg, 0, 0, 2), 4.1, 1e-12);
  EXPECT_EQ(oracle_select({cfg, state, 0, 0}), 2u);
  OraclePolicy oracle;
  const WorldView view{cfg, state, 0, 0};
  EXPECT_EQ(oracle.select(no_obs(), &view), 2u);
  EXPECT_THROW(oracle.select(no_obs(), nullptr), Error);
}

TEST(Oracle, MinimalAgesPickLargestRate) {
  const auto cfg = make_network(1, column({0.3, 0.8, 0.5}), 10);
  EXPECT_EQ(oracle_select({cfg, world(1, {1, 1, 1}), 0, 0}), 1u);
}

TEST(Oracle, TiesGoToArmZero) {
  const auto cfg = make_network(1, column({0.4, 0.4, 0.4}), 10);
  EXPECT_EQ(oracle_select({cfg, world(6, {2, 2, 2}), 0, 0}), 0u);
}

TEST(DiscountedUcb, NoDiscountIsPlainStatistics) {
  DiscountedUcbConfig cfg;
  cfg.discount = 1.0;
  cfg.reward_cap = 1.0;
  DiscountedUcbPolicy ducb(2, cfg);
  ducb.observe(0, 1.0);
  ducb.observe(0, 0.0);
  ducb.observe(1, 1.0);
  EXPECT_DOUBLE_EQ(ducb.discounted_count()[0], 2.0);
  EXPECT_DOUBLE_EQ(ducb.discounted_sum()[0], 1.0);
  EXPECT_DOUBLE_EQ(ducb.discounted_mean(1), 1.0);
}

TEST(DiscountedUcb, GeometricDecay) {
  DiscountedUcbConfig cfg;
  cfg.discount = 0.9;
  cfg.reward_cap = 1.0;
  DiscountedUcbPolicy ducb(2, cfg);
  ducb.observe(0, 1.0);
  ducb.observe(1, 0.0);
  EXPECT_NEAR(ducb.discounted_sum()[0], 0.9, 1e-15);
}

TEST(DiscountedUcb, MatchesBruteForceReplay) {
  // Step shift 0.2 -> 0.8 on arm 0; a second arm keeps steady 0.5.
  const double gamma = 0.95;
  DiscountedUcbConfig cfg;
  cfg.discount = gamma;
  cfg.reward_cap = 1.0;
  DiscountedUcbPolicy ducb(2, cfg);
  std::vector<std::pair<AnIndex, double>> history;
  std::optional<std::size_t> crossed, crossed_replay;
  for (std::size_t t = 0; t < 400; ++t) {
    const AnIndex arm = ducb.select(no_obs(), nullptr);
    const double value = arm == 0 ? (t < 200 ? 0.2 : 0.8) : 0.5;
    ducb.observe(arm, value);
    history.push_back({arm, value});
    // Brute force: weights gamma^(age) over the whole history.
    std::array<double, 2> sum{}, cnt{};
    for (std::size_t s = 0; s < history.size(); ++s) {
      const double w = std::pow(gamma, static_cast<double>(history.size() - 1 - s));
      sum[history[s].first] += w * history[s].second;
      cnt[history[s].first] += w;
    }
    for (std::size_t a = 0; a < 2; ++a) {
      ASSERT_NEAR(ducb.discounted_sum()[a], sum[a], 1e-9);
      ASSERT_NEAR(ducb.discounted_count()[a], cnt[a], 1e-9);
    }
    if (t >= 200 && cnt[0] > 0) {
      if (!crossed_replay && sum[0] / cnt[0] > 0.5) crossed_replay = t;
      if (!crossed && ducb.discounted_mean(0) > 0.5) crossed = t;
    }
    // Index check against the textbook formula.
    if (cnt[0] > 0 && cnt[1] > 0) {
      const double n = cnt[0] + cnt[1];
      std::array<double, 2> idx{};
      for (std::size_t a = 0; a < 2; ++a) {
        idx[a] = sum[a] / cnt[a] + 2.0 * std::sqrt(0.6 * std::log(n) / cnt[a]);
      }
      DiscountedUcbPolicy copy = ducb;
      ASSERT_EQ(copy.select(no_obs(), nullptr), idx[1] > idx[0] ? 1u : 0u);
    }
  }
  ASSERT_TRUE(crossed.has_value());
  EXPECT_EQ(crossed, crossed_replay);
}

TEST(DiscountedUcb, HorizonDefaults) {
  const auto cfg = DiscountedUcbConfig::for_horizon(10000);
  EXPECT_DOUBLE_EQ(cfg.discount, 1.0 - 1.0 / 400.0);
  EXPECT_DOUBLE_EQ(cfg.xi, 0.6);
  EXPECT_THROW(DiscountedUcbPolicy(2, DiscountedUcbConfig{1.5, 0.6, 1.0}), Error);
}

TEST(SlidingWindowUcb, WindowedMean) {
  SlidingWindowUcbConfig cfg;
  cfg.window = 4;
  cfg.reward_cap = 1.0;
  SlidingWindowUcbPolicy sw(1, cfg);
  for (double v : {1.0, 1.0, 0.0, 0.0}) sw.observe(0, v);
  EXPECT_DOUBLE_EQ(sw.windowed_mean(0), 0.5);
  EXPECT_EQ(sw.windowed_count(0), 4u);
  // tau post-change observations flush the old mean.
  for (int i = 0; i < 4; ++i) sw.observe(0, 0.25);
  EXPECT_DOUBLE_EQ(sw.windowed_mean(0), 0.25);
}

TEST(SlidingWindowUcb, LargeWindowIsPlainUcb) {
  SlidingWindowUcbConfig cfg;
  cfg.window = 100000;
  cfg.reward_cap = 1.0;
  SlidingWindowUcbPolicy sw(3, cfg);
  std::array<double, 3> sum{};
  std::array<std::uint64_t, 3> cnt{};
  Rng rng = make_substream(4, StreamDomain::kTest, 14);
  for (std::uint64_t t = 0; t < 3000; ++t) {
    std::optional<AnIndex> expect;
    for (AnIndex a = 0; a < 3 && !expect; ++a) {
      if (cnt[a] == 0) expect = a;
    }
    if (!expect) {
      double best = -1e300;
      for (AnIndex a = 0; a < 3; ++a) {
        const double idx = sum[a] / cnt[a] +
                           2.0 * std::sqrt(0.6 * std::log(static_cast<double>(t + 1)) / cnt[a]);
        if (idx > best) {
          best = idx;
          expect = a;
        }
      }
    }
    const AnIndex arm = sw.select(no_obs(), nullptr);
    ASSERT_EQ(arm, *expect) << "round " << t;
    const double v = bernoulli(rng, 0.2 + 0.3 * arm) ? 1.0 : 0.0;
    sw.observe(arm, v);
    sum[arm] += v;
    cnt[arm] += 1;
  }
}

TEST(SlidingWindowUcb, HorizonDefaults) {
  const auto cfg = SlidingWindowUcbConfig::for_horizon(10000);
  EXPECT_EQ(cfg.window, static_cast<std::size_t>(std::ceil(4.0 * std::sqrt(1e4 * std::log(1e4)))));
}

TEST(RandomPolicy, SingleArmAndFrequencies) {
  Rng rng = make_substream(1, StreamDomain::kTest, 15);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(random_select(rng, 1), 0u);
  std::array<std::size_t, 3> freq{};
  for (int i = 0; i < 300000; ++i) freq[random_select(rng, 3)] += 1;
  for (auto f : freq) EXPECT_NEAR(static_cast<double>(f) / 3e5, 1.0 / 3.0, 0.005);
}

TEST(RandomPolicy, SameSeedSameSequence) {
  RandomPolicy a(4, make_substream(3, StreamDomain::kPolicy, 0, 0));
  RandomPolicy b(4, make_substream(3, StreamDomain::kPolicy, 0, 0));
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.select(no_obs(), nullptr), b.select(no_obs(), nullptr));
}
