#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "agebandit/matrix.hpp"

namespace agebandit {

using AnIndex = std::uint32_t;
using Age = std::int64_t;

// Default reward normalization cap C.
inline constexpr double kDefaultRewardCap = 5.0;

// Scripted switch of the AN update-probability table, taking effect from
// `slot` onward. Only used by diagnostic scenarios.

struct RateChange {
  std::uint64_t slot = 0;
  Matrix<double> update_prob;

  friend bool operator==(const RateChange&, const RateChange&) = default;
};

struct NetworkConfig {
  std::size_t num_clients = 1;  // J
  std::size_t num_ans = 1;      // K
  std::size_t num_servers = 1;  // P
  std::uint64_t horizon = 1;    // T
  Matrix<double> update_prob;   // K x P, r_kp
  double resource_cap = 1.0;    // R
  Matrix<double> request_prob;  // J x P, q_jp
  double reward_cap = kDefaultRewardCap;  // C
  std::uint64_t seed = 0;
  std::vector<RateChange> rate_changes;  // sorted by slot

  /// Update-probability table in force at `slot`.
  const Matrix<double>& update_prob_at(std::uint64_t slot) const;

  std::size_t num_pairs() const noexcept { return num_clients * num_servers; }
  std::size_t pair_index(std::size_t client, std::size_t server) const noexcept {
    return client * num_servers + server;
  }

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

/// Builds a config with q = 1 everywhere and the given K x P update table.
NetworkConfig make_network(std::size_t num_clients, Matrix<double> update_prob,
                           std::uint64_t horizon, double resource_cap = 1.0,
                           std::uint64_t seed = 0);

/// Throws Error{kResourceCapViolation | kProbabilityRange | kZeroDimension |
/// kDimensionMismatch}; returns the config unchanged otherwise.
const NetworkConfig& validate_config(const NetworkConfig& cfg);

struct WorldState {
  Matrix<Age> an_age;      // g, K x P
  Matrix<Age> client_age;  // h, J x P
  std::uint64_t slot = 0;

  static WorldState initial(const NetworkConfig& cfg);
};

// One request per (j, p) at most, encoded as an optional AN index.
struct SlotActions {
  Matrix<std::optional<AnIndex>> requests;  // J x P
  Matrix<std::uint8_t> targeted;            // K x P, 1 if >= 1 request hit (k, p)
  Matrix<std::uint8_t> decisions;           // K x P, gamma; 0 where not targeted
};

struct PairReset {
  std::size_t client = 0;
  std::size_t server = 0;
  std::uint64_t t_local_at_reset = 0;
};

struct SlotOutcome {
  std::uint64_t slot = 0;
  Matrix<Age> rewards;                    // x, J x P
  Matrix<std::optional<AnIndex>> chosen;  // J x P
  Matrix<std::uint8_t> decisions;         // K x P
  Matrix<Age> pre_h;
  Matrix<Age> pre_g;
  std::vector<PairReset> resets;
};

/// h - (1 - r) * min(h, g) for client j, server p, AN k at the state's slot.
double expected_reward(const WorldState& state, const NetworkConfig& cfg, std::size_t client,
                       std::size_t server, AnIndex an);

/// Closed form on raw numbers, shared by the oracle and regret bookkeeping.
inline double expected_reward(Age h, Age g, double r) {
  const Age cached = h < g ? h : g;
  return static_cast<double>(h) - (1.0 - r) * static_cast<double>(cached);
}

}  // namespace agebandit
