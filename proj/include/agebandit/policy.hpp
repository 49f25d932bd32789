#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "agebandit/network.hpp"

namespace agebandit {

// Everything a decentralized client may see when deciding for one (j, p)
// pair: its own age row and its own last observation. No AN ages, nothing
// about other clients.
struct PolicyObservation {
  std::uint64_t slot = 0;
  std::span<const Age> own_age;
  std::optional<AnIndex> last_arm;
  std::optional<double> last_raw_reward;
};

// Full read-only state, handed only to centralized benchmark policies.
struct WorldView {
  const NetworkConfig& config;
  const WorldState& state;
  std::size_t client;
  std::size_t server;
};

enum class Visibility { kLocal, kFullState };

/// Request policy for a single (client, server) pair.
class RequestPolicy {
 public:
  virtual ~RequestPolicy() = default;

  virtual std::string_view name() const = 0;
  virtual Visibility visibility() const { return Visibility::kLocal; }

  /// Called on slots where the pair issues a request. `world` is non-null
  /// only for kFullState policies.
  virtual AnIndex select(const PolicyObservation& obs, const WorldView* world) = 0;

  /// Raw reward for this slot's selection. Returns the local time at reset
  /// if the policy discarded its statistics as a result.
  virtual std::optional<std::uint64_t> observe(AnIndex arm, double raw_reward) = 0;

  /// Called on slots where the pair issues no request.
  virtual void on_idle_slot(const PolicyObservation& /*obs*/) {}
};

using PolicyPtr = std::unique_ptr<RequestPolicy>;

}  // namespace agebandit
