#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agebandit/network.hpp"

namespace agebandit {

enum class ResetKind { kUnclassified, kAbrupt, kGradual };

std::string_view reset_kind_name(ResetKind kind);

struct ResetEvent {
  std::uint64_t slot = 0;
  std::size_t client = 0;
  std::size_t server = 0;
  std::uint64_t t_local_at_reset = 0;
  ResetKind kind = ResetKind::kUnclassified;
};

/// Per-slot record of one simulation. Per-pair series are stored slot-major:
/// entry [t * num_pairs + pair].
struct RunLog {
  std::string policy;
  NetworkConfig config;
  std::uint64_t seed = 0;
  std::size_t num_pairs = 0;
  std::size_t num_arms = 0;

  std::vector<double> mean_aoi;           // mean client age after slot t, i.e. h(t+1)
  std::vector<Age> client_age;            // h(t+1) per pair
  std::vector<Age> reward;                // x(t) per pair
  std::vector<double> pseudo_regret;      // per pair
  std::vector<std::int32_t> chosen;       // per pair, -1 when idle
  std::vector<double> mu;                 // optional: [t][pair][k] expected rewards
  std::vector<ResetEvent> events;

  std::size_t slots() const noexcept { return mean_aoi.size(); }
  bool has_mu_table() const noexcept { return !mu.empty(); }
};

/// Regret of `chosen` against the best AN on the pre-update state; 0 if idle.
double pseudo_regret_slot(const WorldState& pre_state, const NetworkConfig& cfg,
                          std::size_t client, std::size_t server, std::optional<AnIndex> chosen);

/// Appends one slot's outcome to a log. `post_state` is the world after the slot.
class RunRecorder {
 public:
  RunRecorder(const NetworkConfig& cfg, std::string policy, bool record_mu = false);

  void record(const SlotOutcome& outcome, const WorldState& post_state);
  RunLog finish() && { return std::move(log_); }
  const RunLog& log() const noexcept { return log_; }

 private:
  RunLog log_;
  bool record_mu_;
};

/// (1/T) sum_t mean_jp h_jp(t) over the logged slots. Throws Error{kEmptyLog}.
double average_aoi(const RunLog& log);
/// Mean of average_aoi over replications.
double average_aoi(std::span<const RunLog> logs);

/// Running sum over slots of the per-slot total pseudo-regret.
std::vector<double> cumulative_regret(const RunLog& log);

/// h(t+1) - h(t) - 1 + x(t) == 0 for every slot and pair (h(0) = 1).
bool audit_conservation(const RunLog& log);
/// h(t) == t + 1 - sum_{tau < t} x(tau) for every slot and pair.
bool audit_cumulative(const RunLog& log);

struct CsvPaths {
  std::filesystem::path series;
  std::filesystem::path events;
};

/// Writes `series.csv` (t,mean_aoi,cum_regret,resets_so_far) and
/// `events.csv` (slot,pair_j,pair_p,kind) into `dir`. Throws Error{kIoError}.
CsvPaths export_csv(const RunLog& log, const std::filesystem::path& dir);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace agebandit
