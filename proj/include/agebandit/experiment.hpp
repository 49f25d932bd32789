#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agebandit/metrics.hpp"
#include "agebandit/network.hpp"
#include "agebandit/policy.hpp"

namespace agebandit {

inline constexpr std::uint64_t kDeskHorizon = 100'000;

struct ScenarioPreset {
  std::string name;
  std::string description;
  NetworkConfig network;
  std::vector<std::string> roster;          // default policies
  std::vector<std::uint64_t> change_slots;  // ground truth for scripted switches
};

std::vector<ScenarioPreset> builtin_scenarios();
/// Throws Error{kUnknownScenario}.
ScenarioPreset find_scenario(std::string_view name);

/// Identifiers accepted by make_policies().
std::span<const std::string_view> policy_ids();

// Hyperparameters shared by all policies of a run. Unset fields fall back
// to horizon-derived defaults.
struct PolicyParams {
  std::size_t monitor_n = 16;
  double delta_exponent = 3.0;
  std::optional<double> reward_cap;  // default: the network's C
  bool monitor_counts_in_ucb = true;
  std::optional<double> ducb_discount;
  std::optional<std::size_t> swucb_window;
  double xi = 0.6;
};

/// One policy instance per (j, p) pair, indexed by pair_index. Per-pair
/// random streams derive from cfg.seed. Throws Error{kUnknownPolicy}.
std::vector<PolicyPtr> make_policies(std::string_view id, const NetworkConfig& cfg,
                                     const PolicyParams& params);

/// Simulates cfg.horizon slots of one policy with seed cfg.seed.
RunLog run_single(const NetworkConfig& cfg, std::string_view policy, const PolicyParams& params,
                  bool record_mu = false);

struct RunSpec {
  ScenarioPreset scenario;
  std::optional<std::uint64_t> horizon;  // explicit override
  bool full_scale = false;               // use the preset's own T
  std::vector<std::uint64_t> seeds{1};
  std::optional<std::filesystem::path> out_dir;
  std::vector<std::string> policies;     // empty: the scenario roster
  PolicyParams params;
  bool record_mu = false;
  double detect_u = 16.0;                // U for abrupt/gradual reset labels
};

/// Horizon a spec runs for: the override if given, else the preset T
/// (full scale) or min(preset T, kDeskHorizon).
std::uint64_t effective_horizon(const RunSpec& spec);

/// Runs every (policy, seed) combination, policy-major. Writes
/// <out>/<scenario>/<policy>/seed<N>/{series,events}.csv when out_dir is set.
std::vector<RunLog> run_experiment(const RunSpec& spec);

struct PolicySummary {
  std::string policy;
  std::size_t seeds = 0;
  double aoi_mean = 0.0;
  double aoi_stdev = 0.0;
  double regret_mean = 0.0;
  double regret_stdev = 0.0;
  // Seed-averaged R(s) / s at s = T/4, T/2, T.
  double rate_quarter = 0.0;
  double rate_half = 0.0;
  double rate_full = 0.0;
  double resets_mean = 0.0;
};

/// Groups logs by policy in first-appearance order.
std::vector<PolicySummary> summarize(std::span<const RunLog> logs);

std::string format_summary_table(std::span<const PolicySummary> rows);
void write_summary_csv(std::span<const PolicySummary> rows, const std::filesystem::path& path);

}  // namespace agebandit
