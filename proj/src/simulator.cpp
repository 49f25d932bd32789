#include "agebandit/simulator.hpp"

#include <algorithm>
#include <cassert>

#include "agebandit/error.hpp"

namespace agebandit {

EnvironmentStreams::EnvironmentStreams(const NetworkConfig& cfg) : num_servers_(cfg.num_servers) {
  request_.reserve(cfg.num_clients * cfg.num_servers);
  for (std::size_t j = 0; j < cfg.num_clients; ++j) {
    for (std::size_t p = 0; p < cfg.num_servers; ++p) {
      request_.push_back(make_substream(cfg.seed, StreamDomain::kRequest, j, p));
    }
  }
  decision_.reserve(cfg.num_ans * cfg.num_servers);
  for (std::size_t k = 0; k < cfg.num_ans; ++k) {
    for (std::size_t p = 0; p < cfg.num_servers; ++p) {
      decision_.push_back(make_substream(cfg.seed, StreamDomain::kUpdateDecision, k, p));
    }
  }
}

SlotActions sample_requests(const NetworkConfig& cfg, std::span<const PolicyPtr> policies,
                            const WorldState& state, EnvironmentStreams& streams,
                            std::span<const std::optional<AnIndex>> last_arm,
                            std::span<const std::optional<double>> last_reward) {
  assert(policies.size() == cfg.num_pairs());
  SlotActions actions;
  actions.requests = Matrix<std::optional<AnIndex>>(cfg.num_clients, cfg.num_servers);
  actions.targeted = Matrix<std::uint8_t>(cfg.num_ans, cfg.num_servers, 0);
  actions.decisions = Matrix<std::uint8_t>(cfg.num_ans, cfg.num_servers, 0);

  for (std::size_t j = 0; j < cfg.num_clients; ++j) {
    for (std::size_t p = 0; p < cfg.num_servers; ++p) {
      const std::size_t pair = cfg.pair_index(j, p);
      PolicyObservation obs;
      obs.slot = state.slot;
      obs.own_age = state.client_age.row(j);
      if (!last_arm.empty()) obs.last_arm = last_arm[pair];
      if (!last_reward.empty()) obs.last_raw_reward = last_reward[pair];

      RequestPolicy& policy = *policies[pair];
      const bool requests = bernoulli(streams.request(j, p), cfg.request_prob(j, p));
      if (!requests) {
        policy.on_idle_slot(obs);
        continue;
      }
      AnIndex arm = 0;
      if (policy.visibility() == Visibility::kFullState) {
        const WorldView world{cfg, state, j, p};
        arm = policy.select(obs, &world);
      } else {
        arm = policy.select(obs, nullptr);
      }
      if (arm >= cfg.num_ans) {
        throw Error(ErrorCode::kInvalidArgument, std::string(policy.name()) +
                                                     " selected AN " + std::to_string(arm) +
                                                     " outside [0, K)");
      }
      actions.requests(j, p) = arm;
      actions.targeted(arm, p) = 1;
    }
  }
  return actions;
}

void sample_update_decisions(const NetworkConfig& cfg, const WorldState& state,
                             SlotActions& actions, EnvironmentStreams& streams) {
  const auto& r = cfg.update_prob_at(state.slot);
  for (std::size_t k = 0; k < cfg.num_ans; ++k) {
    for (std::size_t p = 0; p < cfg.num_servers; ++p) {
      const bool fetch = bernoulli(streams.decision(k, p), r(k, p));
      actions.decisions(k, p) = (fetch && actions.targeted(k, p)) ? 1 : 0;
    }
  }
}

SlotOutcome compute_rewards(const WorldState& state, const SlotActions& actions) {
  SlotOutcome out;
  out.slot = state.slot;
  out.pre_h = state.client_age;
  out.pre_g = state.an_age;
  out.chosen = actions.requests;
  out.decisions = actions.decisions;
  out.rewards = Matrix<Age>(state.client_age.rows(), state.client_age.cols(), 0);
  for (std::size_t j = 0; j < out.rewards.rows(); ++j) {
    for (std::size_t p = 0; p < out.rewards.cols(); ++p) {
      const auto& arm = actions.requests(j, p);
      if (!arm) continue;
      const Age h = state.client_age(j, p);
      out.rewards(j, p) = actions.decisions(*arm, p) ? h : h - std::min(h, state.an_age(*arm, p));
    }
  }
  return out;
}

void advance_an_ages(WorldState& state, const SlotActions& actions) {
  for (std::size_t k = 0; k < state.an_age.rows(); ++k) {
    for (std::size_t p = 0; p < state.an_age.cols(); ++p) {
      const bool fetched = actions.decisions(k, p) && actions.targeted(k, p);
      state.an_age(k, p) = fetched ? 1 : state.an_age(k, p) + 1;
    }
  }
}

void advance_client_ages(WorldState& state, const SlotActions& actions, const Matrix<Age>& pre_g) {
  for (std::size_t j = 0; j < state.client_age.rows(); ++j) {
    for (std::size_t p = 0; p < state.client_age.cols(); ++p) {
      Age& h = state.client_age(j, p);
      const auto& arm = actions.requests(j, p);
      if (!arm) {
        h += 1;
      } else if (actions.decisions(*arm, p)) {
        h = 1;
      } else {
        h = std::min(h, pre_g(*arm, p)) + 1;
      }
    }
  }
}

Simulator::Simulator(NetworkConfig cfg, std::vector<PolicyPtr> policies)
    : cfg_((validate_config(cfg), std::move(cfg))),
      policies_(std::move(policies)),
      state_(WorldState::initial(cfg_)),
      streams_(cfg_),
      last_arm_(cfg_.num_pairs()),
      last_reward_(cfg_.num_pairs()) {
  if (policies_.size() != cfg_.num_pairs()) {
    throw Error(ErrorCode::kDimensionMismatch, "need one policy per (client, server) pair");
  }
}

SlotOutcome Simulator::step() {
  assert(!done());
  SlotActions actions = sample_requests(cfg_, policies_, state_, streams_, last_arm_, last_reward_);
  sample_update_decisions(cfg_, state_, actions, streams_);
  SlotOutcome out = compute_rewards(state_, actions);
  advance_an_ages(state_, actions);
  advance_client_ages(state_, actions, out.pre_g);

  for (std::size_t j = 0; j < cfg_.num_clients; ++j) {
    for (std::size_t p = 0; p < cfg_.num_servers; ++p) {
      const std::size_t pair = cfg_.pair_index(j, p);
      const auto& arm = out.chosen(j, p);
      if (!arm) continue;
      const double reward = static_cast<double>(out.rewards(j, p));
      last_arm_[pair] = *arm;
      last_reward_[pair] = reward;
      if (auto reset = policies_[pair]->observe(*arm, reward)) {
        out.resets.push_back({j, p, *reset});
      }
    }
  }
  state_.slot += 1;
  return out;
}

}  // namespace agebandit
