#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "agebandit/error.hpp"
#include "agebandit/experiment.hpp"
#include "agebandit/kv_config.hpp"
#include "agebandit/rng.hpp"
#include "agebandit/simulator.hpp"
#include "test_support.hpp"

using namespace agebandit;
using agebandit::testing::column;
using agebandit::testing::fixed_policies;
using agebandit::testing::FixedArmPolicy;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("agebandit_harness_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

NetworkConfig random_config(Rng& rng) {
  const std::size_t j = 1 + uniform_index(rng, 4);
  const std::size_t k = 1 + uniform_index(rng, 5);
  const std::size_t p = 1 + uniform_index(rng, 3);
  Matrix<double> r(k, p);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t s = 0; s < p; ++s) r(a, s) = uniform01(rng) / static_cast<double>(p);
  }
  auto cfg = make_network(j, r, 1 + uniform_index(rng, 1u << 20), 1.0, rng());
  for (std::size_t a = 0; a < j; ++a) {
    for (std::size_t s = 0; s < p; ++s) cfg.request_prob(a, s) = uniform01(rng);
  }
  cfg.reward_cap = 0.5 + 100.0 * uniform01(rng);
  cfg.resource_cap = 1.0 + uniform01(rng);
  if (uniform01(rng) < 0.5) {
    Matrix<double> r2 = r;
    r2(0, 0) = uniform01(rng) / static_cast<double>(p);
    cfg.rate_changes.push_back({uniform_index(rng, cfg.horizon), r2});
  }
  return cfg;
}

}  // namespace

TEST(KvConfig, RoundTripIsBitExact) {
  Rng rng = make_substream(42, StreamDomain::kTest, 20);
  for (int i = 0; i < 200; ++i) {
    const NetworkConfig cfg = random_config(rng);
    const std::string text = format_network_config(cfg);
    const NetworkConfig back = parse_network_config(text);
    ASSERT_TRUE(back == cfg) << text;
    ASSERT_EQ(format_network_config(back), text);
  }
}

TEST(KvConfig, CommentsDefaultsAndBroadcast) {
  const auto cfg = parse_network_config(
      "# scenario one\n"
      "num_clients = 2   # J\n"
      "update_prob = 0.1; 0.4; 0.7\n"
      "request_prob = 0.5\n"
      "horizon = 1000\n"
      "\n"
      "rate_change.500 = 0.7; 0.4; 0.1\n");
  EXPECT_EQ(cfg.num_clients, 2u);
  EXPECT_EQ(cfg.num_ans, 3u);
  EXPECT_EQ(cfg.num_servers, 1u);
  EXPECT_EQ(cfg.request_prob, Matrix<double>(2, 1, 0.5));
  EXPECT_DOUBLE_EQ(cfg.reward_cap, kDefaultRewardCap);
  ASSERT_EQ(cfg.rate_changes.size(), 1u);
  EXPECT_EQ(cfg.rate_changes[0].slot, 500u);
  EXPECT_DOUBLE_EQ(cfg.update_prob_at(600)(0, 0), 0.7);
  EXPECT_NO_THROW(validate_config(cfg));
}

TEST(KvConfig, ErrorsCarryLineNumbers) {
  try {
    parse_network_config("update_prob = 0.5\nbogus = 1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(parse_network_config("horizon = 10\n"), Error);
  EXPECT_THROW(parse_network_config("update_prob = 0.5, x\n"), Error);
  EXPECT_THROW(parse_network_config("update_prob = 0.5, 0.1; 0.2\n"), Error);
  EXPECT_THROW(parse_network_config("update_prob = 0.5\nnum_ans = 2\n"), Error);
  EXPECT_THROW(parse_network_config("update_prob\n"), Error);
  EXPECT_THROW(load_network_config("/nonexistent/agebandit.cfg"), Error);
}

TEST(Scenarios, Presets) {
  const auto s1 = find_scenario("scenario1");
  EXPECT_EQ(s1.network.update_prob, column({0.1, 0.4, 0.7}));
  EXPECT_EQ(s1.network.horizon, 600000u);
  EXPECT_EQ(s1.network.num_clients, 2u);
  EXPECT_EQ(s1.network.request_prob, Matrix<double>(2, 1, 1.0));
  const auto s2 = find_scenario("scenario2");
  EXPECT_EQ(s2.network.update_prob, column({0.3, 0.4, 0.5}));
  EXPECT_EQ(s2.network.horizon, 600000u);
  const auto single = find_scenario("single_an_analytic");
  EXPECT_EQ(single.network.num_ans, 1u);
  EXPECT_EQ(single.network.update_prob, column({0.5}));
  const auto abrupt = find_scenario("synthetic_abrupt");
  ASSERT_EQ(abrupt.change_slots.size(), 1u);
  EXPECT_EQ(abrupt.network.rate_changes.size(), 1u);
  try {
    find_scenario("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownScenario);
  }
}

TEST(Harness, EffectiveHorizon) {
  RunSpec spec;
  spec.scenario = find_scenario("scenario1");
  EXPECT_EQ(effective_horizon(spec), kDeskHorizon);
  spec.full_scale = true;
  EXPECT_EQ(effective_horizon(spec), 600000u);
  spec.horizon = 1234;
  EXPECT_EQ(effective_horizon(spec), 1234u);
}

TEST(Harness, UnknownPolicyRejected) {
  RunSpec spec;
  spec.scenario = find_scenario("single_an_analytic");
  spec.horizon = 10;
  spec.policies = {"oracle", "mdmamab"};
  try {
    run_experiment(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownPolicy);
  }
  const auto cfg = find_scenario("scenario1").network;
  EXPECT_THROW(make_policies("nope", cfg, {}), Error);
  spec.policies = {"oracle"};
  spec.seeds.clear();
  EXPECT_THROW(run_experiment(spec), Error);
}

TEST(Harness, PolicySeedGridAndLayout) {
  const auto dir = scratch_dir("grid");
  RunSpec spec;
  spec.scenario = find_scenario("scenario1");
  spec.horizon = 500;
  spec.seeds = {1, 2, 3};
  spec.policies = {"abar", "random"};
  spec.out_dir = dir;
  const auto logs = run_experiment(spec);
  ASSERT_EQ(logs.size(), 6u);
  EXPECT_EQ(logs[0].policy, "abar");
  EXPECT_EQ(logs[3].policy, "random");
  EXPECT_EQ(logs[4].seed, 2u);
  for (const char* policy : {"abar", "random"}) {
    for (int seed = 1; seed <= 3; ++seed) {
      const auto run = dir / "scenario1" / policy / ("seed" + std::to_string(seed));
      EXPECT_TRUE(std::filesystem::exists(run / "series.csv")) << run;
      EXPECT_TRUE(std::filesystem::exists(run / "events.csv")) << run;
    }
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "scenario1" / "summary.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Harness, SameSpecTwiceIsByteIdentical) {
  RunSpec spec;
  spec.scenario = find_scenario("synthetic_abrupt");
  spec.horizon = 12000;
  spec.seeds = {4, 9};
  const auto a = scratch_dir("det_a");
  const auto b = scratch_dir("det_b");
  spec.out_dir = a;
  run_experiment(spec);
  spec.out_dir = b;
  run_experiment(spec);
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), a);
    ASSERT_TRUE(std::filesystem::exists(b / rel)) << rel;
    EXPECT_EQ(slurp(entry.path()), slurp(b / rel)) << rel;
    ++files;
  }
  EXPECT_EQ(files, 4u * 2u * 2u + 1u);
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}

TEST(Harness, OracleOnlyRegretFileIsZero) {
  const auto dir = scratch_dir("oracle");
  RunSpec spec;
  spec.scenario = find_scenario("scenario2");
  spec.horizon = 2000;
  spec.policies = {"oracle"};
  spec.out_dir = dir;
  run_experiment(spec);
  std::istringstream series(slurp(dir / "scenario2" / "oracle" / "seed1" / "series.csv"));
  std::string line;
  std::getline(series, line);
  std::size_t rows = 0;
  while (std::getline(series, line)) {
    std::stringstream cells(line);
    std::string t, aoi, regret;
    std::getline(cells, t, ',');
    std::getline(cells, aoi, ',');
    std::getline(cells, regret, ',');
    ASSERT_EQ(regret, "0") << line;
    ++rows;
  }
  EXPECT_EQ(rows, 2000u);
  std::filesystem::remove_all(dir);
}

TEST(Harness, SummaryStatistics) {
  RunSpec spec;
  spec.scenario = find_scenario("scenario1");
  spec.horizon = 4000;
  spec.policies = {"oracle"};
  const auto single = summarize(run_experiment(spec));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].seeds, 1u);
  EXPECT_EQ(single[0].aoi_stdev, 0.0);
  EXPECT_EQ(single[0].regret_mean, 0.0);

  spec.seeds = {1, 2, 3};
  spec.policies = {"random", "oracle"};
  const auto logs = run_experiment(spec);
  const auto rows = summarize(logs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].policy, "random");
  double mean = 0.0;
  for (int i = 0; i < 3; ++i) mean += average_aoi(logs[i]);
  mean /= 3.0;
  EXPECT_NEAR(rows[0].aoi_mean, mean, 1e-12);
  double ss = 0.0;
  for (int i = 0; i < 3; ++i) ss += std::pow(average_aoi(logs[i]) - mean, 2);
  EXPECT_NEAR(rows[0].aoi_stdev, std::sqrt(ss / 2.0), 1e-12);
  const auto cum = cumulative_regret(logs[0]);
  EXPECT_GT(rows[0].rate_full, 0.0);
  EXPECT_NEAR(rows[1].aoi_mean, (average_aoi(logs[3]) + average_aoi(logs[4]) + average_aoi(logs[5])) / 3.0,
              1e-12);
  EXPECT_EQ(rows[1].regret_mean, 0.0);
  EXPECT_FALSE(format_summary_table(rows).empty());
  EXPECT_GT(cum.back(), 0.0);
}

TEST(Harness, EnvironmentDrawsSharedAcrossPolicies) {
  // Client 0 always plays AN 0; client 1 differs between runs. Client 0's
  // trajectory depends only on AN 0's gamma stream, so it must not change.
  auto cfg = make_network(2, column({0.3, 0.6}), 3000, 1.0, 11);
  auto run = [&](AnIndex other) {
    std::vector<PolicyPtr> policies;
    policies.push_back(std::make_unique<FixedArmPolicy>(0));
    policies.push_back(std::make_unique<FixedArmPolicy>(other));
    Simulator sim(cfg, std::move(policies));
    std::vector<Age> ages;
    while (!sim.done()) {
      sim.step();
      ages.push_back(sim.state().client_age(0, 0));
    }
    return ages;
  };
  EXPECT_EQ(run(0), run(1));

  // Same seed, different policies: identical request streams and gamma draws.
  const auto a = run_single(cfg, "oracle", {});
  const auto b = run_single(cfg, "random", {});
  EXPECT_NE(a.chosen, b.chosen);
  EnvironmentStreams s1(cfg), s2(cfg);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(s1.decision(1, 0)(), s2.decision(1, 0)());
}

TEST(Harness, AbruptScenarioLabelsResets) {
  RunSpec spec;
  spec.scenario = find_scenario("synthetic_abrupt");
  spec.policies = {"abar"};
  spec.seeds = {1, 2, 3, 4, 5};
  const std::uint64_t change = spec.scenario.change_slots.at(0);
  const std::uint64_t window = 16 * spec.scenario.network.num_ans * 16;
  auto check = [&](const std::vector<RunLog>& logs, std::uint64_t window) {
    for (const auto& log : logs) {
      bool after_change = false;
      for (const auto& ev : log.events) {
        after_change |= ev.slot >= change;
        const bool abrupt = ev.slot >= change && ev.slot - change <= window;
        EXPECT_EQ(ev.kind, abrupt ? ResetKind::kAbrupt : ResetKind::kGradual) << ev.slot;
      }
      EXPECT_TRUE(after_change) << "seed " << log.seed;
    }
  };
  check(run_experiment(spec), window);
  spec.detect_u = 64.0;
  check(run_experiment(spec), 16 * spec.scenario.network.num_ans * 64);
}
