#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "agebandit/metrics.hpp"

namespace agebandit {

/// Expected-reward table mu[t][k] for one (client, server) pair plus the
/// epochs delimited by that pair's resets. Simulation-only.
struct DriftDiagnostics {
  std::size_t num_arms = 0;
  std::vector<double> mu;                   // slot-major, num_arms per slot
  std::vector<std::uint64_t> epoch_starts;  // ascending, always starts with 0

  std::size_t slots() const noexcept { return num_arms == 0 ? 0 : mu.size() / num_arms; }
  double at(std::size_t slot, std::size_t arm) const { return mu[slot * num_arms + arm]; }
};

/// Builds diagnostics for `pair` from a log recorded with record_mu; mu is
/// divided by `scale`. Epochs restart the slot after each reset of the pair.
/// Throws Error{kMissingMuTable}.
DriftDiagnostics drift_diagnostics(const RunLog& log, std::size_t pair, double scale = 1.0);

/// eps(t) = max_{s <= t} max_i |mu_{i,s} - mu_{i,start}| within each epoch.
std::vector<double> drift_series(const DriftDiagnostics& diag);

/// Delta_i = max_j mu_{j,start} - mu_{i,start} at the start of each epoch.
std::vector<std::vector<double>> epoch_gaps(const DriftDiagnostics& diag);

/// sum_t (reg(t) - c eps(t))^+ with reg(t) = max_i mu_{i,t} - mu_{chosen,t};
/// idle slots (chosen < 0) contribute 0.
double drift_tolerant_regret(const DriftDiagnostics& diag, std::span<const std::int32_t> chosen,
                             double c);
double drift_tolerant_regret(const RunLog& log, std::size_t pair, const DriftDiagnostics& diag,
                             double c);

struct ChangePoint {
  std::uint64_t slot = 0;            // |mu_{i,slot+1} - mu_{i,slot}| > b for i in arms
  std::vector<std::size_t> arms;     // K_m
  std::vector<double> magnitudes;    // jump per arm in `arms`
};

struct ChangeReport {
  std::vector<ChangePoint> change_points;
  std::uint64_t gradual_steps = 0;  // slot transitions where no arm jumps by more than b
};

ChangeReport classify_changes(const DriftDiagnostics& diag, double b);

/// Labels resets within `window` slots at or after a change point as abrupt,
/// all others as gradual.
void classify_resets(std::span<ResetEvent> resets, std::span<const std::uint64_t> change_slots,
                     std::uint64_t window);

struct DetectabilityParams {
  std::size_t monitor_n = 16;  // N
  double b = 1e-3;
  std::uint64_t horizon = 1;   // T
  std::size_t num_arms = 1;    // K
  std::vector<double> u;       // U_m per change point; a single value is broadcast
};

struct DetectabilityEntry {
  std::uint64_t slot = 0;
  double epsilon_m = 0.0;
  double threshold = 0.0;  // right-hand side of condition (i)
  bool condition_i = false;
  bool condition_ii = false;
  std::uint64_t last_gradual_reset = 0;  // X_{T_m}
  std::optional<std::uint64_t> delay;    // first reset at or after T_m, before T_{m+1}
  double delay_bound = 0.0;              // 16 K U_m
  bool detectable() const noexcept { return condition_i && condition_ii; }
};

/// sqrt(log(T^3) / 2U) + 6 b K N + 2 sqrt(log(T^3) / 2N) + b.
double detectability_threshold(double u, const DetectabilityParams& params);

/// `resets` must belong to the same pair as the change report.
std::vector<DetectabilityEntry> detectability_report(const ChangeReport& changes,
                                                     std::span<const ResetEvent> resets,
                                                     const DetectabilityParams& params);

}  // namespace agebandit
