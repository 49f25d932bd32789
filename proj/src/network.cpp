#include "agebandit/network.hpp"

#include <cmath>
#include <string>

#include "agebandit/error.hpp"

namespace agebandit {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kResourceCapViolation: return "ResourceCapViolation";
    case ErrorCode::kProbabilityRange: return "ProbabilityRange";
    case ErrorCode::kZeroDimension: return "ZeroDimension";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroCount: return "ZeroCount";
    case ErrorCode::kEmptyLog: return "EmptyLog";
    case ErrorCode::kMissingMuTable: return "MissingMuTable";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kUnknownPolicy: return "UnknownPolicy";
    case ErrorCode::kUnknownScenario: return "UnknownScenario";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

const Matrix<double>& NetworkConfig::update_prob_at(std::uint64_t slot) const {
  const Matrix<double>* active = &update_prob;
  for (const auto& change : rate_changes) {
    if (change.slot > slot) break;
    active = &change.update_prob;
  }
  return *active;
}

NetworkConfig make_network(std::size_t num_clients, Matrix<double> update_prob,
                           std::uint64_t horizon, double resource_cap, std::uint64_t seed) {
  NetworkConfig cfg;
  cfg.num_clients = num_clients;
  cfg.num_ans = update_prob.rows();
  cfg.num_servers = update_prob.cols();
  cfg.horizon = horizon;
  cfg.update_prob = std::move(update_prob);
  cfg.resource_cap = resource_cap;
  cfg.request_prob = Matrix<double>(num_clients, cfg.num_servers, 1.0);
  cfg.seed = seed;
  return cfg;
}

namespace {

bool is_probability(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

void check_update_table(const NetworkConfig& cfg, const Matrix<double>& r, const char* label) {
  if (r.rows() != cfg.num_ans || r.cols() != cfg.num_servers) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(label) + " must be K x P (" + std::to_string(cfg.num_ans) + " x " +
                    std::to_string(cfg.num_servers) + ")");
  }
  for (std::size_t k = 0; k < r.rows(); ++k) {
    double total = 0.0;
    for (std::size_t p = 0; p < r.cols(); ++p) {
      if (!is_probability(r(k, p))) {
        throw Error(ErrorCode::kProbabilityRange, std::string(label) + "[" + std::to_string(k) +
                                                      "][" + std::to_string(p) +
                                                      "] outside [0,1]");
      }
      total += r(k, p);
    }
    // Absorbs rounding in sums such as 0.1 + 0.2 + 0.7.
    if (total > cfg.resource_cap + 1e-12) {
      throw Error(ErrorCode::kResourceCapViolation,
                  "AN " + std::to_string(k) + " uses " + std::to_string(total) + " > R = " +
                      std::to_string(cfg.resource_cap));
    }
  }
}

}  // namespace

const NetworkConfig& validate_config(const NetworkConfig& cfg) {
  if (cfg.num_clients == 0 || cfg.num_ans == 0 || cfg.num_servers == 0 || cfg.horizon == 0) {
    throw Error(ErrorCode::kZeroDimension, "J, K, P and T must all be at least 1");
  }
  if (!(cfg.resource_cap >= 0.0) || !std::isfinite(cfg.resource_cap)) {
    throw Error(ErrorCode::kInvalidArgument, "resource cap R must be a nonnegative real");
  }
  if (!(cfg.reward_cap > 0.0) || !std::isfinite(cfg.reward_cap)) {
    throw Error(ErrorCode::kInvalidArgument, "reward cap C must be positive");
  }
  check_update_table(cfg, cfg.update_prob, "update_prob");
  std::uint64_t previous = 0;
  for (const auto& change : cfg.rate_changes) {
    if (change.slot < previous) {
      throw Error(ErrorCode::kInvalidArgument, "rate changes must be sorted by slot");
    }
    previous = change.slot;
    check_update_table(cfg, change.update_prob, "rate_change.update_prob");
  }
  const auto& q = cfg.request_prob;
  if (q.rows() != cfg.num_clients || q.cols() != cfg.num_servers) {
    throw Error(ErrorCode::kDimensionMismatch, "request_prob must be J x P");
  }
  for (double v : q.values()) {
    if (!is_probability(v)) throw Error(ErrorCode::kProbabilityRange, "request_prob outside [0,1]");
  }
  return cfg;
}

WorldState WorldState::initial(const NetworkConfig& cfg) {
  WorldState state;
  state.an_age = Matrix<Age>(cfg.num_ans, cfg.num_servers, 1);
  state.client_age = Matrix<Age>(cfg.num_clients, cfg.num_servers, 1);
  state.slot = 0;
  return state;
}

double expected_reward(const WorldState& state, const NetworkConfig& cfg, std::size_t client,
                       std::size_t server, AnIndex an) {
  const double r = cfg.update_prob_at(state.slot)(an, server);
  return expected_reward(state.client_age(client, server), state.an_age(an, server), r);
}

}  // namespace agebandit
