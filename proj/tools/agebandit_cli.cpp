#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "agebandit/error.hpp"
#include "agebandit/experiment.hpp"
#include "agebandit/kv_config.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(',', start);
    std::string item = s.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    if (!item.empty()) out.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::uint64_t parse_seed(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw agebandit::Error(agebandit::ErrorCode::kInvalidArgument, "bad seed '" + s + "'");
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace agebandit;

  CLI::App app{"Age-of-information bandit simulator"};
  app.require_subcommand(1);

  auto* list_scen = app.add_subcommand("list-scenarios", "Print built-in scenario presets");
  auto* list_pol = app.add_subcommand("list-policies", "Print policy identifiers");

  auto* sim = app.add_subcommand("simulate", "Run policies on a scenario and write CSV logs");
  std::string scenario_name;
  std::string policy_list;
  std::size_t num_seeds = 0;
  std::string seed_list;
  std::uint64_t horizon = 0;
  std::string out_dir;
  std::string config_file;
  bool full_scale = false;
  bool quiet = false;
  PolicyParams params;
  double reward_cap = 0.0;

  sim->add_option("--scenario", scenario_name, "Scenario preset name")->required();
  sim->add_option("--policy", policy_list, "Comma-separated policy ids (default: preset roster)");
  auto* seeds_opt = sim->add_option("--seeds", num_seeds, "Run seeds 1..n")->check(CLI::PositiveNumber);
  auto* list_opt = sim->add_option("--seed-list", seed_list, "Comma-separated explicit seeds");
  seeds_opt->excludes(list_opt);
  auto* horizon_opt = sim->add_option("--horizon", horizon, "Override the number of slots")
                          ->check(CLI::PositiveNumber);
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--config", config_file, "Network config file replacing the preset network");
  sim->add_flag("--full-scale", full_scale, "Use the preset's full horizon");
  sim->add_option("--monitor-n", params.monitor_n, "ABAR monitoring rounds per subblock")
      ->check(CLI::PositiveNumber);
  sim->add_option("--delta-exp", params.delta_exponent, "ABAR detector confidence exponent")
      ->check(CLI::PositiveNumber);
  auto* cap_opt = sim->add_option("--reward-cap", reward_cap, "Reward normalization cap C")
                      ->check(CLI::PositiveNumber);
  sim->add_flag("--quiet", quiet, "Do not print the summary table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list_scen) {
      for (const auto& preset : builtin_scenarios()) {
        std::cout << preset.name << "  T=" << preset.network.horizon << "  " << preset.description
                  << '\n';
      }
      return 0;
    }
    if (*list_pol) {
      for (const auto id : policy_ids()) std::cout << id << '\n';
      return 0;
    }

    RunSpec spec;
    spec.scenario = find_scenario(scenario_name);
    if (!config_file.empty()) spec.scenario.network = load_network_config(config_file);
    if (*horizon_opt) spec.horizon = horizon;
    spec.full_scale = full_scale;
    if (*seeds_opt) {
      spec.seeds.clear();
      for (std::uint64_t s = 1; s <= num_seeds; ++s) spec.seeds.push_back(s);
    } else if (*list_opt) {
      spec.seeds.clear();
      for (const auto& s : split_list(seed_list)) spec.seeds.push_back(parse_seed(s));
    }
    if (!out_dir.empty()) spec.out_dir = out_dir;
    spec.policies = split_list(policy_list);
    if (*cap_opt) params.reward_cap = reward_cap;
    spec.params = params;

    const auto logs = run_experiment(spec);
    if (!quiet) {
      std::cout << spec.scenario.name << "  T=" << effective_horizon(spec)
                << "  seeds=" << spec.seeds.size() << '\n'
                << format_summary_table(summarize(logs));
    }
  } catch (const Error& e) {
    std::cerr << "agebandit: " << error_code_name(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "agebandit: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
