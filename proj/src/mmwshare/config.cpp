#include "mmwshare/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mmwshare/error.hpp"
#include "mmwshare/format.hpp"

namespace mmwshare {
namespace {

struct BadValue {
  std::string message;
};

std::string scalar_text(const YAML::Node& node) {
  if (!node.IsScalar()) throw BadValue{"expected a scalar"};
  return node.Scalar();
}

double to_double(const YAML::Node& node) {
  const std::string s = scalar_text(node);
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [end, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) throw BadValue{"'" + s + "' is not a number"};
  if (!std::isfinite(v)) throw BadValue{"'" + s + "' is not finite"};
  return v;
}

std::uint64_t to_u64(const YAML::Node& node) {
  const std::string s = scalar_text(node);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
    throw BadValue{"'" + s + "' is not a non-negative integer"};
  }
  return v;
}

std::size_t to_count(const YAML::Node& node, std::size_t min) {
  const std::uint64_t v = to_u64(node);
  if (v < min) throw BadValue{"must be >= " + std::to_string(min) + " (got " + std::to_string(v) + ")"};
  return static_cast<std::size_t>(v);
}

double to_positive(const YAML::Node& node) {
  const double v = to_double(node);
  if (!(v > 0.0)) throw BadValue{"must be positive (got " + node.Scalar() + ")"};
  return v;
}

template <typename T, typename Read>
std::vector<T> to_list(const YAML::Node& node, Read read) {
  std::vector<T> out;
  if (node.IsNull()) return out;
  if (node.IsScalar()) {
    out.push_back(read(node));
    return out;
  }
  if (!node.IsSequence()) throw BadValue{"expected a scalar or a list of scalars"};
  for (const YAML::Node& item : node) out.push_back(read(item));
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += items[i];
  }
  return out + "]";
}

template <typename T, typename Fmt>
std::string list_text(const std::vector<T>& values, Fmt fmt) {
  std::vector<std::string> items;
  for (const T& v : values) items.push_back(fmt(v));
  return join(items);
}

std::string num(double v) { return format_shortest(v); }
std::string count(std::size_t v) { return std::to_string(v); }

struct Field {
  std::string key;
  std::function<void(ScenarioConfig&, const YAML::Node&)> read;
  std::function<std::string(const ScenarioConfig&)> write;
};

// sites.* lists are staged here and resolved once all keys are read
struct Staged {
  std::vector<double> x, y, height;
  std::vector<std::size_t> op;
};

thread_local Staged* current = nullptr;

const std::vector<Field>& field_table() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    const auto count_field = [&t](std::string key, std::size_t ScenarioConfig::*member, std::size_t min) {
      t.push_back({std::move(key), [member, min](ScenarioConfig& c, const YAML::Node& n) { c.*member = to_count(n, min); },
                   [member](const ScenarioConfig& c) { return count(c.*member); }});
    };
    const auto real_field = [&t](std::string key, double ScenarioConfig::*member, bool positive) {
      t.push_back({std::move(key),
                   [member, positive](ScenarioConfig& c, const YAML::Node& n) {
                     c.*member = positive ? to_positive(n) : to_double(n);
                   },
                   [member](const ScenarioConfig& c) { return num(c.*member); }});
    };
    const auto pathloss_fields = [&t](const std::string& prefix, PathlossParams ScenarioConfig::*member) {
      t.push_back({prefix + ".alpha_db", [member](ScenarioConfig& c, const YAML::Node& n) { (c.*member).alpha_db = to_double(n); },
                   [member](const ScenarioConfig& c) { return num((c.*member).alpha_db); }});
      t.push_back({prefix + ".beta_db",
                   [member](ScenarioConfig& c, const YAML::Node& n) { (c.*member).beta_db_per_decade = to_double(n); },
                   [member](const ScenarioConfig& c) { return num((c.*member).beta_db_per_decade); }});
      t.push_back({prefix + ".shadow_sigma_db",
                   [member](ScenarioConfig& c, const YAML::Node& n) {
                     const double v = to_double(n);
                     if (v < 0.0) throw BadValue{"must be >= 0"};
                     (c.*member).shadow_sigma_db = v;
                   },
                   [member](const ScenarioConfig& c) { return num((c.*member).shadow_sigma_db); }});
    };
    const auto site_field = [&t](std::string key, std::vector<double> Staged::*list, int axis) {
      t.push_back({std::move(key),
                   [list](ScenarioConfig&, const YAML::Node& n) {
                     current->*list = to_list<double>(n, [](const YAML::Node& v) { return to_double(v); });
                   },
                   [axis](const ScenarioConfig& c) {
                     return list_text(c.bs_positions, [axis](const Position& p) {
                       return num(axis == 0 ? p.x : axis == 1 ? p.y : p.z);
                     });
                   }});
    };

    count_field("operators", &ScenarioConfig::operators, 1);
    count_field("bs_count", &ScenarioConfig::bs_count, 1);
    count_field("ues_per_bs", &ScenarioConfig::ues_per_bs, 1);
    count_field("slots", &ScenarioConfig::slots, 1);
    t.push_back({"array.horizontal",
                 [](ScenarioConfig& c, const YAML::Node& n) { c.array.n_horizontal = to_count(n, 1); },
                 [](const ScenarioConfig& c) { return count(c.array.n_horizontal); }});
    t.push_back({"array.vertical", [](ScenarioConfig& c, const YAML::Node& n) { c.array.n_vertical = to_count(n, 1); },
                 [](const ScenarioConfig& c) { return count(c.array.n_vertical); }});
    real_field("area.side_m", &ScenarioConfig::area_side, true);
    real_field("grid.cell_m", &ScenarioConfig::cell_size, true);
    site_field("sites.x_m", &Staged::x, 0);
    site_field("sites.y_m", &Staged::y, 1);
    site_field("sites.height_m", &Staged::height, 2);
    t.push_back({"sites.operator",
                 [](ScenarioConfig&, const YAML::Node& n) {
                   current->op = to_list<std::size_t>(n, [](const YAML::Node& v) { return to_count(v, 0); });
                 },
                 [](const ScenarioConfig& c) { return list_text(c.bs_operator, count); }});
    pathloss_fields("pathloss.los", &ScenarioConfig::los);
    pathloss_fields("pathloss.nlos", &ScenarioConfig::nlos);
    count_field("channel.paths", &ScenarioConfig::paths, 1);
    real_field("channel.nlos_variance", &ScenarioConfig::nlos_variance, false);
    real_field("channel.nlos_elevation_min_deg", &ScenarioConfig::nlos_elevation_min_deg, true);
    real_field("channel.nlos_elevation_max_deg", &ScenarioConfig::nlos_elevation_max_deg, true);
    real_field("link.tx_power_dbm", &ScenarioConfig::tx_power_dbm, false);
    real_field("link.noise_power_dbm", &ScenarioConfig::noise_power_dbm, false);
    t.push_back({"schedule.ranking",
                 [](ScenarioConfig& c, const YAML::Node& n) {
                   c.ranking = to_list<std::size_t>(n, [](const YAML::Node& v) { return to_count(v, 0); });
                 },
                 [](const ScenarioConfig& c) { return list_text(c.ranking, count); }});
    t.push_back({"schedule.policies",
                 [](ScenarioConfig& c, const YAML::Node& n) {
                   c.policies = to_list<PolicyKind>(n, [](const YAML::Node& v) {
                     try {
                       return parse_policy_kind(scalar_text(v));
                     } catch (const Error& e) {
                       throw BadValue{e.what()};
                     }
                   });
                 },
                 [](const ScenarioConfig& c) {
                   return list_text(c.policies, [](PolicyKind k) { return std::string(policy_name(k)); });
                 }});
    real_field("footprint.threshold", &ScenarioConfig::footprint_threshold, true);
    t.push_back({"privacy.k_values",
                 [](ScenarioConfig& c, const YAML::Node& n) {
                   c.k_values = to_list<std::size_t>(n, [](const YAML::Node& v) { return to_count(v, 0); });
                 },
                 [](const ScenarioConfig& c) { return list_text(c.k_values, count); }});
    real_field("privacy.detection_area_m2", &ScenarioConfig::detection_area, true);
    real_field("privacy.target_dp", &ScenarioConfig::target_dp, true);
    t.push_back({"nlos.variances",
                 [](ScenarioConfig& c, const YAML::Node& n) {
                   c.nlos_variances = to_list<double>(n, [](const YAML::Node& v) {
                     const double x = to_double(v);
                     if (x < 0.0 || x > 1.0) throw BadValue{"variances must lie in [0, 1]"};
                     return x;
                   });
                 },
                 [](const ScenarioConfig& c) { return list_text(c.nlos_variances, num); }});
    count_field("mc.runs", &ScenarioConfig::runs, 1);
    t.push_back({"mc.seed", [](ScenarioConfig& c, const YAML::Node& n) { c.seed = to_u64(n); },
                 [](const ScenarioConfig& c) { return std::to_string(c.seed); }});
    t.push_back({"export.beams",
                 [](ScenarioConfig& c, const YAML::Node& n) {
                   c.export_beams = to_list<std::size_t>(n, [](const YAML::Node& v) { return to_count(v, 1); });
                 },
                 [](const ScenarioConfig& c) { return list_text(c.export_beams, count); }});
    return t;
  }();
  return table;
}

[[noreturn]] void parse_error(const YAML::Mark& mark, const std::string& key, const std::string& message) {
  const std::string where = mark.is_null() ? std::string() : "line " + std::to_string(mark.line + 1) + ", ";
  fail(ErrorCode::kParse, "config: " + where + "key '" + key + "': " + message);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const Field& f : field_table()) out.push_back(f.key);
    return out;
  }();
  return keys;
}

ScenarioConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    fail(ErrorCode::kParse, "config: line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  ScenarioConfig config;
  if (root.IsNull()) return config;
  if (!root.IsMap()) fail(ErrorCode::kParse, "config: top level must be a mapping of dotted keys");

  Staged staged;
  current = &staged;
  std::set<std::string> seen;
  const auto& table = field_table();
  for (const auto& entry : root) {
    const std::string key = entry.first.as<std::string>();
    const YAML::Node& value = entry.second;
    const YAML::Mark mark = entry.first.Mark();
    if (!seen.insert(key).second) parse_error(mark, key, "duplicate key");
    if (value.IsMap()) parse_error(mark, key, "nested mappings are not supported; use dotted keys");
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
    if (it == table.end()) parse_error(mark, key, "unknown key");
    try {
      it->read(config, value);
    } catch (const BadValue& e) {
      parse_error(value.Mark(), key, e.message);
    }
  }
  current = nullptr;

  const bool has_x = seen.count("sites.x_m") > 0;
  const bool has_y = seen.count("sites.y_m") > 0;
  const bool has_h = seen.count("sites.height_m") > 0;
  if (has_x != has_y) fail(ErrorCode::kParse, "config: sites.x_m and sites.y_m must be given together");
  if (has_x) {
    if (staged.x.size() != staged.y.size()) fail(ErrorCode::kParse, "config: sites.x_m and sites.y_m differ in length");
    if (seen.count("bs_count") == 0) config.bs_count = staged.x.size();
    if (staged.x.size() != config.bs_count) fail(ErrorCode::kParse, "config: sites.x_m length must equal bs_count");
    config.bs_positions.clear();
    for (std::size_t b = 0; b < staged.x.size(); ++b) config.bs_positions.push_back(Position{staged.x[b], staged.y[b], 10.0});
  } else if (seen.count("bs_count") > 0) {
    config.place_sites_evenly();
  }
  if (has_h) {
    if (staged.height.size() != config.bs_positions.size()) {
      fail(ErrorCode::kParse, "config: sites.height_m length must equal bs_count");
    }
    for (std::size_t b = 0; b < staged.height.size(); ++b) config.bs_positions[b].z = staged.height[b];
  }
  if (seen.count("sites.operator") > 0) {
    config.bs_operator = staged.op;
  } else {
    config.bs_operator.clear();
    for (std::size_t b = 0; b < config.bs_count; ++b) config.bs_operator.push_back(b % config.operators);
  }
  if (seen.count("ues_per_bs") > 0 && seen.count("slots") == 0) config.slots = config.ues_per_bs;

  try {
    config.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kParse, e.what());
  }
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& config) {
  std::string out;
  for (const Field& f : field_table()) out += f.key + ": " + f.write(config) + "\n";
  return out;
}

}  // namespace mmwshare
