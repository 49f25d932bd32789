#include "agebandit/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "agebandit/abar.hpp"
#include "agebandit/baselines.hpp"
#include "agebandit/diagnostics.hpp"
#include "agebandit/error.hpp"
#include "agebandit/simulator.hpp"

namespace agebandit {

namespace {

constexpr std::array<std::string_view, 5> kPolicyIds{"abar", "ducb", "swucb", "oracle", "random"};

Matrix<double> column(std::initializer_list<double> values) {
  Matrix<double> m(values.size(), 1);
  std::size_t k = 0;
  for (double v : values) m(k++, 0) = v;
  return m;
}

const std::vector<std::string> kFullRoster{"abar", "ducb", "swucb", "oracle", "random"};

}  // namespace

std::vector<ScenarioPreset> builtin_scenarios() {
  std::vector<ScenarioPreset> out;
  out.push_back({"scenario1", "J=2 K=3 P=1, well-separated update probabilities (0.1, 0.4, 0.7)",
                 make_network(2, column({0.1, 0.4, 0.7}), 600'000), kFullRoster, {}});
  out.push_back({"scenario2", "J=2 K=3 P=1, close update probabilities (0.3, 0.4, 0.5)",
                 make_network(2, column({0.3, 0.4, 0.5}), 600'000), kFullRoster, {}});
  out.push_back({"single_an_analytic", "J=1 K=1 P=1, r=0.5; stationary mean AoI is 1/r = 2",
                 make_network(1, column({0.5}), kDeskHorizon), {"oracle", "random", "abar"}, {}});

  ScenarioPreset abrupt{"synthetic_abrupt",
                        "J=1 K=3 P=1, r swaps (0.1, 0.4, 0.7) -> (0.7, 0.4, 0.1) at slot 10000",
                        make_network(1, column({0.1, 0.4, 0.7}), 20'000),
                        {"abar", "ducb", "swucb", "oracle"},
                        {10'000}};
  abrupt.network.rate_changes.push_back({10'000, column({0.7, 0.4, 0.1})});
  out.push_back(std::move(abrupt));

  for (const auto& preset : out) validate_config(preset.network);
  return out;
}

ScenarioPreset find_scenario(std::string_view name) {
  for (auto& preset : builtin_scenarios()) {
    if (preset.name == name) return preset;
  }
  throw Error(ErrorCode::kUnknownScenario, "no scenario named '" + std::string(name) + "'");
}

std::span<const std::string_view> policy_ids() { return kPolicyIds; }

std::vector<PolicyPtr> make_policies(std::string_view id, const NetworkConfig& cfg,
                                     const PolicyParams& params) {
  const double cap = params.reward_cap.value_or(cfg.reward_cap);
  std::vector<PolicyPtr> out;
  out.reserve(cfg.num_pairs());
  for (std::size_t j = 0; j < cfg.num_clients; ++j) {
    for (std::size_t p = 0; p < cfg.num_servers; ++p) {
      if (id == "abar") {
        AbarConfig abar;
        abar.monitor_n = params.monitor_n;
        abar.delta_exponent = params.delta_exponent;
        abar.reward_cap = cap;
        abar.monitor_counts_in_ucb = params.monitor_counts_in_ucb;
        out.push_back(std::make_unique<AbarPolicy>(cfg.num_ans, cfg.horizon, abar));
      } else if (id == "ducb") {
        auto d = DiscountedUcbConfig::for_horizon(cfg.horizon, cap);
        if (params.ducb_discount) d.discount = *params.ducb_discount;
        d.xi = params.xi;
        out.push_back(std::make_unique<DiscountedUcbPolicy>(cfg.num_ans, d));
      } else if (id == "swucb") {
        auto s = SlidingWindowUcbConfig::for_horizon(cfg.horizon, cap);
        if (params.swucb_window) s.window = *params.swucb_window;
        s.xi = params.xi;
        out.push_back(std::make_unique<SlidingWindowUcbPolicy>(cfg.num_ans, s));
      } else if (id == "oracle") {
        out.push_back(std::make_unique<OraclePolicy>());
      } else if (id == "random") {
        out.push_back(std::make_unique<RandomPolicy>(
            cfg.num_ans, make_substream(cfg.seed, StreamDomain::kPolicy, j, p)));
      } else {
        throw Error(ErrorCode::kUnknownPolicy, "no policy named '" + std::string(id) + "'");
      }
    }
  }
  return out;
}

RunLog run_single(const NetworkConfig& cfg, std::string_view policy, const PolicyParams& params,
                  bool record_mu) {
  Simulator sim(cfg, make_policies(policy, cfg, params));
  RunRecorder recorder(sim.config(), std::string(policy), record_mu);
  while (!sim.done()) {
    const SlotOutcome out = sim.step();
    recorder.record(out, sim.state());
  }
  return std::move(recorder).finish();
}

std::uint64_t effective_horizon(const RunSpec& spec) {
  if (spec.horizon) return *spec.horizon;
  if (spec.full_scale) return spec.scenario.network.horizon;
  return std::min(spec.scenario.network.horizon, kDeskHorizon);
}

std::vector<RunLog> run_experiment(const RunSpec& spec) {
  if (spec.seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "need at least one seed");
  const std::vector<std::string>& policies =
      spec.policies.empty() ? spec.scenario.roster : spec.policies;
  for (const auto& id : policies) {
    if (std::find(kPolicyIds.begin(), kPolicyIds.end(), id) == kPolicyIds.end()) {
      throw Error(ErrorCode::kUnknownPolicy, "no policy named '" + id + "'");
    }
  }
  NetworkConfig base = spec.scenario.network;
  base.horizon = effective_horizon(spec);
  validate_config(base);

  const std::uint64_t label_window = static_cast<std::uint64_t>(
      std::ceil(16.0 * static_cast<double>(base.num_ans) * spec.detect_u));

  std::vector<RunLog> logs;
  for (const auto& id : policies) {
    for (const std::uint64_t seed : spec.seeds) {
      NetworkConfig cfg = base;
      cfg.seed = seed;
      RunLog log = run_single(cfg, id, spec.params, spec.record_mu);
      if (!spec.scenario.change_slots.empty()) {
        classify_resets(log.events, spec.scenario.change_slots, label_window);
      }
      if (spec.out_dir) {
        export_csv(log, *spec.out_dir / spec.scenario.name / id / ("seed" + std::to_string(seed)));
      }
      logs.push_back(std::move(log));
    }
  }
  if (spec.out_dir) {
    const auto rows = summarize(logs);
    write_summary_csv(rows, *spec.out_dir / spec.scenario.name / "summary.csv");
  }
  return logs;
}

namespace {

struct MeanStdev {
  double mean = 0.0;
  double stdev = 0.0;
};

MeanStdev mean_stdev(const std::vector<double>& xs) {
  MeanStdev out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.stdev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return out;
}

double rate_at(const std::vector<double>& cumulative, std::size_t slots) {
  slots = std::clamp<std::size_t>(slots, 1, cumulative.size());
  return cumulative[slots - 1] / static_cast<double>(slots);
}

}  // namespace

std::vector<PolicySummary> summarize(std::span<const RunLog> logs) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunLog*>> groups;
  for (const auto& log : logs) {
    if (!groups.count(log.policy)) order.push_back(log.policy);
    groups[log.policy].push_back(&log);
  }
  std::vector<PolicySummary> rows;
  for (const auto& policy : order) {
    std::vector<double> aoi, regret, quarter, half, full, resets;
    for (const RunLog* log : groups[policy]) {
      const auto cum = cumulative_regret(*log);
      aoi.push_back(average_aoi(*log));
      regret.push_back(cum.back());
      const std::size_t t = cum.size();
      quarter.push_back(rate_at(cum, t / 4));
      half.push_back(rate_at(cum, t / 2));
      full.push_back(rate_at(cum, t));
      resets.push_back(static_cast<double>(log->events.size()));
    }
    PolicySummary row;
    row.policy = policy;
    row.seeds = aoi.size();
    const auto a = mean_stdev(aoi);
    const auto r = mean_stdev(regret);
    row.aoi_mean = a.mean;
    row.aoi_stdev = a.stdev;
    row.regret_mean = r.mean;
    row.regret_stdev = r.stdev;
    row.rate_quarter = mean_stdev(quarter).mean;
    row.rate_half = mean_stdev(half).mean;
    row.rate_full = mean_stdev(full).mean;
    row.resets_mean = mean_stdev(resets).mean;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_summary_table(std::span<const PolicySummary> rows) {
  std::ostringstream out;
  out << std::left << std::setw(8) << "policy" << std::right << std::setw(6) << "seeds"
      << std::setw(22) << "avg AoI (+-sd)" << std::setw(26) << "cum regret (+-sd)"
      << std::setw(11) << "R(T/4)/." << std::setw(11) << "R(T/2)/." << std::setw(11)
      << "R(T)/T" << std::setw(9) << "resets" << '\n';
  out << std::fixed;
  for (const auto& row : rows) {
    std::ostringstream aoi, reg;
    aoi << std::fixed << std::setprecision(4) << row.aoi_mean << " +- " << row.aoi_stdev;
    reg << std::fixed << std::setprecision(1) << row.regret_mean << " +- " << row.regret_stdev;
    out << std::left << std::setw(8) << row.policy << std::right << std::setw(6) << row.seeds
        << std::setw(22) << aoi.str() << std::setw(26) << reg.str() << std::setprecision(5)
        << std::setw(11) << row.rate_quarter << std::setw(11) << row.rate_half << std::setw(11)
        << row.rate_full << std::setprecision(1) << std::setw(9) << row.resets_mean << '\n';
  }
  return out.str();
}

void write_summary_csv(std::span<const PolicySummary> rows, const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  out << "policy,seeds,aoi_mean,aoi_stdev,regret_mean,regret_stdev,rate_quarter,rate_half,"
         "rate_full,resets_mean\n";
  for (const auto& row : rows) {
    out << row.policy << ',' << row.seeds << ',' << format_double(row.aoi_mean) << ','
        << format_double(row.aoi_stdev) << ',' << format_double(row.regret_mean) << ','
        << format_double(row.regret_stdev) << ',' << format_double(row.rate_quarter) << ','
        << format_double(row.rate_half) << ',' << format_double(row.rate_full) << ','
        << format_double(row.resets_mean) << '\n';
  }
  if (!out.flush()) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

}  // namespace agebandit
