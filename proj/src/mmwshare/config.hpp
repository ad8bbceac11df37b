#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mmwshare/harness.hpp"

namespace mmwshare {

// Scenario files are flat YAML mappings with dotted keys, e.g.
//
//   bs_count: 3
//   link.noise_power_dbm: -90
//   privacy.k_values: [0, 3, 15]
//
// Values are scalars or flow/block sequences of scalars. Omitted keys keep
// their defaults. If bs_count is given without sites.*, the sites are spread
// evenly; if operators is given without sites.operator, operators are
// assigned round-robin; if ues_per_bs is given without slots, slots follows.

/// Every accepted key, in serialization order.
const std::vector<std::string>& config_keys();

/// Throws Error(kParse) with "line N, key 'k': ..." on malformed input,
/// unknown keys, nested maps or values out of range.
ScenarioConfig parse_config(std::string_view text);

ScenarioConfig load_config(const std::string& path);

/// Every key, one per line, numbers in shortest round-trip form.
std::string serialize_config(const ScenarioConfig& config);

}  // namespace mmwshare
