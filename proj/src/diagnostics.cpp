#include "agebandit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agebandit/error.hpp"

namespace agebandit {

DriftDiagnostics drift_diagnostics(const RunLog& log, std::size_t pair, double scale) {
  if (!log.has_mu_table()) {
    throw Error(ErrorCode::kMissingMuTable, "run was not recorded with an expected-reward table");
  }
  if (pair >= log.num_pairs) throw Error(ErrorCode::kInvalidArgument, "pair index out of range");
  DriftDiagnostics diag;
  diag.num_arms = log.num_arms;
  diag.mu.reserve(log.slots() * log.num_arms);
  const std::size_t stride = log.num_pairs * log.num_arms;
  for (std::size_t t = 0; t < log.slots(); ++t) {
    for (std::size_t k = 0; k < log.num_arms; ++k) {
      diag.mu.push_back(log.mu[t * stride + pair * log.num_arms + k] / scale);
    }
  }
  diag.epoch_starts.push_back(0);
  const std::size_t servers = log.config.num_servers;
  for (const auto& ev : log.events) {
    if (ev.client * servers + ev.server != pair) continue;
    if (ev.slot + 1 < log.slots()) diag.epoch_starts.push_back(ev.slot + 1);
  }
  std::sort(diag.epoch_starts.begin(), diag.epoch_starts.end());
  diag.epoch_starts.erase(std::unique(diag.epoch_starts.begin(), diag.epoch_starts.end()),
                          diag.epoch_starts.end());
  return diag;
}

namespace {

template <typename Fn>
void for_each_epoch(const DriftDiagnostics& diag, Fn&& fn) {
  const std::size_t slots = diag.slots();
  std::vector<std::uint64_t> starts = diag.epoch_starts;
  if (starts.empty() || starts.front() != 0) starts.insert(starts.begin(), 0);
  for (std::size_t e = 0; e < starts.size(); ++e) {
    const std::size_t begin = starts[e];
    const std::size_t end = e + 1 < starts.size() ? starts[e + 1] : slots;
    if (begin < end) fn(begin, end);
  }
}

}  // namespace

std::vector<double> drift_series(const DriftDiagnostics& diag) {
  std::vector<double> eps(diag.slots(), 0.0);
  for_each_epoch(diag, [&](std::size_t begin, std::size_t end) {
    double running = 0.0;
    for (std::size_t t = begin; t < end; ++t) {
      for (std::size_t k = 0; k < diag.num_arms; ++k) {
        running = std::max(running, std::abs(diag.at(t, k) - diag.at(begin, k)));
      }
      eps[t] = running;
    }
  });
  return eps;
}

std::vector<std::vector<double>> epoch_gaps(const DriftDiagnostics& diag) {
  std::vector<std::vector<double>> gaps;
  for_each_epoch(diag, [&](std::size_t begin, std::size_t) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < diag.num_arms; ++k) best = std::max(best, diag.at(begin, k));
    std::vector<double> row(diag.num_arms);
    for (std::size_t k = 0; k < diag.num_arms; ++k) row[k] = best - diag.at(begin, k);
    gaps.push_back(std::move(row));
  });
  return gaps;
}

double drift_tolerant_regret(const DriftDiagnostics& diag, std::span<const std::int32_t> chosen,
                             double c) {
  if (diag.mu.empty()) throw Error(ErrorCode::kMissingMuTable, "empty expected-reward table");
  if (chosen.size() != diag.slots()) {
    throw Error(ErrorCode::kDimensionMismatch, "chosen-arm series length differs from mu table");
  }
  const std::vector<double> eps = drift_series(diag);
  double total = 0.0;
  for (std::size_t t = 0; t < diag.slots(); ++t) {
    if (chosen[t] < 0) continue;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < diag.num_arms; ++k) best = std::max(best, diag.at(t, k));
    const double reg = best - diag.at(t, static_cast<std::size_t>(chosen[t]));
    total += std::max(reg - c * eps[t], 0.0);
  }
  return total;
}

double drift_tolerant_regret(const RunLog& log, std::size_t pair, const DriftDiagnostics& diag,
                             double c) {
  std::vector<std::int32_t> chosen(log.slots());
  for (std::size_t t = 0; t < log.slots(); ++t) chosen[t] = log.chosen[t * log.num_pairs + pair];
  return drift_tolerant_regret(diag, chosen, c);
}

ChangeReport classify_changes(const DriftDiagnostics& diag, double b) {
  ChangeReport report;
  for (std::size_t t = 0; t + 1 < diag.slots(); ++t) {
    ChangePoint point;
    point.slot = t;
    for (std::size_t k = 0; k < diag.num_arms; ++k) {
      const double jump = std::abs(diag.at(t + 1, k) - diag.at(t, k));
      if (jump > b) {
        point.arms.push_back(k);
        point.magnitudes.push_back(jump);
      }
    }
    if (point.arms.empty()) {
      ++report.gradual_steps;
    } else {
      report.change_points.push_back(std::move(point));
    }
  }
  return report;
}

void classify_resets(std::span<ResetEvent> resets, std::span<const std::uint64_t> change_slots,
                     std::uint64_t window) {
  for (auto& ev : resets) {
    const bool abrupt = std::any_of(change_slots.begin(), change_slots.end(), [&](std::uint64_t c) {
      return ev.slot >= c && ev.slot - c <= window;
    });
    ev.kind = abrupt ? ResetKind::kAbrupt : ResetKind::kGradual;
  }
}

double detectability_threshold(double u, const DetectabilityParams& params) {
  const double log_t3 = 3.0 * std::log(static_cast<double>(params.horizon));
  const double kn = static_cast<double>(params.num_arms * params.monitor_n);
  return std::sqrt(log_t3 / (2.0 * u)) + 6.0 * params.b * kn +
         2.0 * std::sqrt(log_t3 / (2.0 * static_cast<double>(params.monitor_n))) + params.b;
}

std::vector<DetectabilityEntry> detectability_report(const ChangeReport& changes,
                                                     std::span<const ResetEvent> resets,
                                                     const DetectabilityParams& params) {
  if (params.u.empty()) throw Error(ErrorCode::kInvalidArgument, "U_m must be supplied");
  if (params.u.size() != 1 && params.u.size() != changes.change_points.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "need one U_m per change point or a single value");
  }
  std::vector<DetectabilityEntry> report;
  const auto& points = changes.change_points;
  for (std::size_t m = 0; m < points.size(); ++m) {
    const ChangePoint& cp = points[m];
    const double u = params.u.size() == 1 ? params.u[0] : params.u[m];
    DetectabilityEntry entry;
    entry.slot = cp.slot;
    entry.epsilon_m = *std::min_element(cp.magnitudes.begin(), cp.magnitudes.end());
    entry.threshold = detectability_threshold(u, params);
    entry.condition_i = entry.epsilon_m >= entry.threshold;
    entry.delay_bound = 16.0 * static_cast<double>(params.num_arms) * u;

    for (const auto& ev : resets) {
      if (ev.kind == ResetKind::kGradual && ev.slot < cp.slot) {
        entry.last_gradual_reset = std::max(entry.last_gradual_reset, ev.slot);
      }
    }
    entry.condition_ii = static_cast<double>(cp.slot - entry.last_gradual_reset) >=
                         32.0 * static_cast<double>(params.num_arms) * u;

    const std::uint64_t next = m + 1 < points.size() ? points[m + 1].slot
                                                     : std::numeric_limits<std::uint64_t>::max();
    for (const auto& ev : resets) {
      if (ev.slot >= cp.slot && ev.slot < next) {
        if (!entry.delay || ev.slot - cp.slot < *entry.delay) entry.delay = ev.slot - cp.slot;
      }
    }
    report.push_back(std::move(entry));
  }
  return report;
}

}  // namespace agebandit
