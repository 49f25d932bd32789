#pragma once

#include <span>
#include <vector>

#include "agebandit/network.hpp"
#include "agebandit/policy.hpp"
#include "agebandit/rng.hpp"

namespace agebandit {

// Per-(j, p) request streams and per-(k, p) update-decision streams derived
// from the root seed. Every stream advances exactly once per slot whether or
// not its draw is used, so trajectories of different policies share the
// same environment randomness slot by slot.
class EnvironmentStreams {
 public:
  explicit EnvironmentStreams(const NetworkConfig& cfg);

  Rng& request(std::size_t client, std::size_t server) {
    return request_[client * num_servers_ + server];
  }
  Rng& decision(std::size_t an, std::size_t server) { return decision_[an * num_servers_ + server]; }

 private:
  std::size_t num_servers_;
  std::vector<Rng> request_;
  std::vector<Rng> decision_;
};

/// Draws which pairs request this slot and asks each requesting pair's
/// policy for an AN. `policies` is indexed by cfg.pair_index(j, p); idle
/// pairs get on_idle_slot().
SlotActions sample_requests(const NetworkConfig& cfg, std::span<const PolicyPtr> policies,
                            const WorldState& state, EnvironmentStreams& streams,
                            std::span<const std::optional<AnIndex>> last_arm = {},
                            std::span<const std::optional<double>> last_reward = {});

/// One shared Bernoulli(r_kp) draw per (k, p) per slot.
void sample_update_decisions(const NetworkConfig& cfg, const WorldState& state,
                             SlotActions& actions, EnvironmentStreams& streams);

/// Rewards on the pre-update state; also snapshots h and g.
SlotOutcome compute_rewards(const WorldState& state, const SlotActions& actions);

void advance_an_ages(WorldState& state, const SlotActions& actions);

/// Uses the pre-update AN ages `pre_g`.
void advance_client_ages(WorldState& state, const SlotActions& actions, const Matrix<Age>& pre_g);

class Simulator {
 public:
  /// `policies` must hold cfg.num_pairs() entries indexed by pair_index.
  Simulator(NetworkConfig cfg, std::vector<PolicyPtr> policies);

  /// Advances one slot. Precondition: !done().
  SlotOutcome step();

  bool done() const noexcept { return state_.slot >= cfg_.horizon; }
  const WorldState& state() const noexcept { return state_; }
  const NetworkConfig& config() const noexcept { return cfg_; }
  RequestPolicy& policy(std::size_t client, std::size_t server) {
    return *policies_[cfg_.pair_index(client, server)];
  }

 private:
  NetworkConfig cfg_;
  std::vector<PolicyPtr> policies_;
  WorldState state_;
  EnvironmentStreams streams_;
  std::vector<std::optional<AnIndex>> last_arm_;
  std::vector<std::optional<double>> last_reward_;
};

}  // namespace agebandit
