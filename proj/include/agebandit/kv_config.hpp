#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "agebandit/network.hpp"

namespace agebandit {

// Plain-text network configuration:
//
//   # comment
//   num_clients = 2
//   update_prob = 0.1; 0.4; 0.7       # rows separated by ';', columns by ','
//   request_prob = 1                  # scalar broadcasts to J x P
//   rate_change.10000 = 0.7; 0.4; 0.1 # table in force from slot 10000
//
// Unknown keys are rejected. Keys absent from the text keep make_network()
// defaults; K and P are taken from update_prob.

/// Throws Error{kParse} with the offending line number.
NetworkConfig parse_network_config(std::string_view text);

/// Inverse of parse_network_config; doubles are written in shortest
/// round-trip form, so parse(format(cfg)) == cfg bit for bit.
std::string format_network_config(const NetworkConfig& cfg);

/// Reads and parses a file. Throws Error{kIoError | kParse}.
NetworkConfig load_network_config(const std::filesystem::path& path);

}  // namespace agebandit
