#include "agebandit/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>

#include "agebandit/error.hpp"

namespace agebandit {

std::string_view reset_kind_name(ResetKind kind) {
  switch (kind) {
    case ResetKind::kAbrupt: return "abrupt_reset";
    case ResetKind::kGradual: return "gradual_reset";
    case ResetKind::kUnclassified: break;
  }
  return "reset";
}

namespace {

double best_expected(const Matrix<Age>& h, const Matrix<Age>& g, const Matrix<double>& r,
                     std::size_t client, std::size_t server) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.rows(); ++k) {
    best = std::max(best, expected_reward(h(client, server), g(k, server), r(k, server)));
  }
  return best;
}

}  // namespace

double pseudo_regret_slot(const WorldState& pre_state, const NetworkConfig& cfg,
                          std::size_t client, std::size_t server, std::optional<AnIndex> chosen) {
  if (!chosen) return 0.0;
  const auto& r = cfg.update_prob_at(pre_state.slot);
  const double best = best_expected(pre_state.client_age, pre_state.an_age, r, client, server);
  const double got = expected_reward(pre_state, cfg, client, server, *chosen);
  return std::max(0.0, best - got);
}

RunRecorder::RunRecorder(const NetworkConfig& cfg, std::string policy, bool record_mu)
    : record_mu_(record_mu) {
  log_.policy = std::move(policy);
  log_.config = cfg;
  log_.seed = cfg.seed;
  log_.num_pairs = cfg.num_pairs();
  log_.num_arms = cfg.num_ans;
  const std::size_t slots = cfg.horizon;
  log_.mean_aoi.reserve(slots);
  log_.client_age.reserve(slots * log_.num_pairs);
  log_.reward.reserve(slots * log_.num_pairs);
  log_.pseudo_regret.reserve(slots * log_.num_pairs);
  log_.chosen.reserve(slots * log_.num_pairs);
  if (record_mu_) log_.mu.reserve(slots * log_.num_pairs * log_.num_arms);
}

void RunRecorder::record(const SlotOutcome& outcome, const WorldState& post_state) {
  const NetworkConfig& cfg = log_.config;
  const auto& r = cfg.update_prob_at(outcome.slot);
  const auto& pre_h = outcome.pre_h;
  const auto& pre_g = outcome.pre_g;

  double total_age = 0.0;
  for (std::size_t j = 0; j < cfg.num_clients; ++j) {
    for (std::size_t p = 0; p < cfg.num_servers; ++p) {
      const Age h_next = post_state.client_age(j, p);
      total_age += static_cast<double>(h_next);
      log_.client_age.push_back(h_next);
      log_.reward.push_back(outcome.rewards(j, p));

      const auto& arm = outcome.chosen(j, p);
      log_.chosen.push_back(arm ? static_cast<std::int32_t>(*arm) : -1);
      double regret = 0.0;
      if (arm) {
        const double best = best_expected(pre_h, pre_g, r, j, p);
        regret = std::max(0.0, best - expected_reward(pre_h(j, p), pre_g(*arm, p), r(*arm, p)));
      }
      log_.pseudo_regret.push_back(regret);
      if (record_mu_) {
        for (std::size_t k = 0; k < cfg.num_ans; ++k) {
          log_.mu.push_back(expected_reward(pre_h(j, p), pre_g(k, p), r(k, p)));
        }
      }
    }
  }
  log_.mean_aoi.push_back(total_age / static_cast<double>(cfg.num_pairs()));
  for (const auto& reset : outcome.resets) {
    log_.events.push_back({outcome.slot, reset.client, reset.server, reset.t_local_at_reset,
                           ResetKind::kUnclassified});
  }
}

double average_aoi(const RunLog& log) {
  if (log.mean_aoi.empty()) throw Error(ErrorCode::kEmptyLog, "run log has no slots");
  const double total = std::accumulate(log.mean_aoi.begin(), log.mean_aoi.end(), 0.0);
  return total / static_cast<double>(log.mean_aoi.size());
}

double average_aoi(std::span<const RunLog> logs) {
  if (logs.empty()) throw Error(ErrorCode::kEmptyLog, "no run logs");
  double total = 0.0;
  for (const auto& log : logs) total += average_aoi(log);
  return total / static_cast<double>(logs.size());
}

std::vector<double> cumulative_regret(const RunLog& log) {
  std::vector<double> out;
  out.reserve(log.slots());
  double running = 0.0;
  for (std::size_t t = 0; t < log.slots(); ++t) {
    for (std::size_t pair = 0; pair < log.num_pairs; ++pair) {
      running += log.pseudo_regret[t * log.num_pairs + pair];
    }
    out.push_back(running);
  }
  return out;
}

bool audit_conservation(const RunLog& log) {
  for (std::size_t pair = 0; pair < log.num_pairs; ++pair) {
    Age previous = 1;
    for (std::size_t t = 0; t < log.slots(); ++t) {
      const std::size_t i = t * log.num_pairs + pair;
      if (log.client_age[i] - previous - 1 + log.reward[i] != 0) return false;
      previous = log.client_age[i];
    }
  }
  return true;
}

bool audit_cumulative(const RunLog& log) {
  for (std::size_t pair = 0; pair < log.num_pairs; ++pair) {
    Age reward_sum = 0;
    for (std::size_t t = 0; t < log.slots(); ++t) {
      const std::size_t i = t * log.num_pairs + pair;
      reward_sum += log.reward[i];
      // client_age[i] is h(t + 1).
      const Age expected = static_cast<Age>(t + 1) + 1 - reward_sum;
      if (log.client_age[i] != expected) return false;
    }
  }
  return true;
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

CsvPaths export_csv(const RunLog& log, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());

  CsvPaths paths{dir / "series.csv", dir / "events.csv"};
  std::ofstream series(paths.series, std::ios::binary | std::ios::trunc);
  if (!series) throw Error(ErrorCode::kIoError, "cannot open " + paths.series.string());
  series << "t,mean_aoi,cum_regret,resets_so_far\n";
  const std::vector<double> regret = cumulative_regret(log);
  std::size_t next_event = 0;
  std::size_t resets = 0;
  for (std::size_t t = 0; t < log.slots(); ++t) {
    while (next_event < log.events.size() && log.events[next_event].slot <= t) {
      ++next_event;
      ++resets;
    }
    series << (t + 1) << ',' << format_double(log.mean_aoi[t]) << ',' << format_double(regret[t])
           << ',' << resets << '\n';
  }
  if (!series.flush()) throw Error(ErrorCode::kIoError, "write failed: " + paths.series.string());

  std::ofstream events(paths.events, std::ios::binary | std::ios::trunc);
  if (!events) throw Error(ErrorCode::kIoError, "cannot open " + paths.events.string());
  // Both files number slots from 1, matching the series' t column.
  events << "slot,pair_j,pair_p,kind\n";
  for (const auto& ev : log.events) {
    events << (ev.slot + 1) << ',' << ev.client << ',' << ev.server << ',' << reset_kind_name(ev.kind)
           << '\n';
  }
  if (!events.flush()) throw Error(ErrorCode::kIoError, "write failed: " + paths.events.string());
  return paths;
}

}  // namespace agebandit
