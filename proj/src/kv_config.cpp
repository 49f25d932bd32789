#include "agebandit/kv_config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "agebandit/error.hpp"
#include "agebandit/metrics.hpp"

namespace agebandit {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + msg);
}

double parse_real(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    fail(line, "expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_count(std::string_view s, std::size_t line) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    fail(line, "expected a nonnegative integer, got '" + std::string(s) + "'");
  }
  return v;
}

Matrix<double> parse_matrix(std::string_view s, std::size_t line) {
  const auto rows = split(s, ';');
  std::vector<std::vector<double>> values;
  for (auto row : rows) {
    std::vector<double> cols;
    for (auto cell : split(row, ',')) cols.push_back(parse_real(cell, line));
    if (!values.empty() && cols.size() != values.front().size()) {
      fail(line, "ragged matrix rows");
    }
    values.push_back(std::move(cols));
  }
  Matrix<double> m(values.size(), values.front().size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    for (std::size_t c = 0; c < values[r].size(); ++c) m(r, c) = values[r][c];
  }
  return m;
}

std::string format_matrix(const Matrix<double>& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r > 0) out += "; ";
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ", ";
      out += format_double(m(r, c));
    }
  }
  return out;
}

}  // namespace

NetworkConfig parse_network_config(std::string_view text) {
  NetworkConfig cfg;
  std::optional<Matrix<double>> request;
  std::optional<std::size_t> clients;
  std::optional<std::size_t> ans;
  std::optional<std::size_t> servers;
  std::map<std::uint64_t, Matrix<double>> changes;
  bool have_update = false;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? end : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (value.empty()) fail(line_no, "empty value for '" + std::string(key) + "'");

    if (key == "num_clients") {
      clients = parse_count(value, line_no);
    } else if (key == "num_ans" || key == "num_servers") {
      // Implied by update_prob; accepted so formatted files stay explicit.
      (key == "num_ans" ? ans : servers) = parse_count(value, line_no);
    } else if (key == "horizon") {
      cfg.horizon = parse_count(value, line_no);
    } else if (key == "update_prob") {
      cfg.update_prob = parse_matrix(value, line_no);
      have_update = true;
    } else if (key == "resource_cap") {
      cfg.resource_cap = parse_real(value, line_no);
    } else if (key == "request_prob") {
      request = parse_matrix(value, line_no);
    } else if (key == "reward_cap") {
      cfg.reward_cap = parse_real(value, line_no);
    } else if (key == "seed") {
      cfg.seed = parse_count(value, line_no);
    } else if (key.starts_with("rate_change.")) {
      const std::uint64_t slot = parse_count(key.substr(12), line_no);
      changes[slot] = parse_matrix(value, line_no);
    } else {
      fail(line_no, "unknown key '" + std::string(key) + "'");
    }
  }

  if (!have_update) throw Error(ErrorCode::kParse, "missing required key 'update_prob'");
  if (ans && *ans != cfg.update_prob.rows()) {
    throw Error(ErrorCode::kParse, "num_ans disagrees with update_prob rows");
  }
  if (servers && *servers != cfg.update_prob.cols()) {
    throw Error(ErrorCode::kParse, "num_servers disagrees with update_prob columns");
  }
  cfg.num_ans = cfg.update_prob.rows();
  cfg.num_servers = cfg.update_prob.cols();
  cfg.num_clients = clients.value_or(request ? request->rows() : 1);
  if (!request) {
    cfg.request_prob = Matrix<double>(cfg.num_clients, cfg.num_servers, 1.0);
  } else if (request->rows() == 1 && request->cols() == 1) {
    cfg.request_prob = Matrix<double>(cfg.num_clients, cfg.num_servers, (*request)(0, 0));
  } else {
    cfg.request_prob = std::move(*request);
  }
  for (auto& [slot, table] : changes) cfg.rate_changes.push_back({slot, std::move(table)});
  return cfg;
}

std::string format_network_config(const NetworkConfig& cfg) {
  std::ostringstream out;
  out << "num_clients = " << cfg.num_clients << '\n'
      << "num_ans = " << cfg.num_ans << '\n'
      << "num_servers = " << cfg.num_servers << '\n'
      << "horizon = " << cfg.horizon << '\n'
      << "update_prob = " << format_matrix(cfg.update_prob) << '\n'
      << "resource_cap = " << format_double(cfg.resource_cap) << '\n'
      << "request_prob = " << format_matrix(cfg.request_prob) << '\n'
      << "reward_cap = " << format_double(cfg.reward_cap) << '\n'
      << "seed = " << cfg.seed << '\n';
  for (const auto& change : cfg.rate_changes) {
    out << "rate_change." << change.slot << " = " << format_matrix(change.update_prob) << '\n';
  }
  return out.str();
}

NetworkConfig load_network_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network_config(buf.str());
}

}  // namespace agebandit
