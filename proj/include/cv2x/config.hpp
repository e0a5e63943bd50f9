#pragma once

// Scenario files: INI with one section per configuration group.
//
//   [scenario] n_vehicles mode duration_s seed warmup_subframes message_size_bytes mcs d_list aoi_th_list
//   [pool]     sc rt t1 t2 rc_min rc_max beta p_th_init_dbm
//   [link]     tx_power_dbm fc_ghz bandwidth_hz noise_figure_db sinr_threshold_tb_db
//              sinr_threshold_sci_db rsrp_offset_db shadowing shadowing_sigma_db
//   [mobility] rows cols block_m step_s accel decel v_max tau eta length min_gap
//
// Lists are comma separated. Every key is optional; unknown sections or keys are errors.

#include <charconv>
#include <fstream>
#include <functional>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cv2x/engine.hpp"

namespace cv2x::config {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  T v{};
  if constexpr (std::is_floating_point_v<T>) {
    try {
      std::size_t used = 0;
      v = static_cast<T>(std::stod(s, &used));
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ConfigError("'" + key + "': expected a number, got '" + s + "'");
    }
  } else {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw ConfigError("'" + key + "': expected an integer, got '" + s + "'");
  }
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("'" + key + "': expected a boolean, got '" + s + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& raw) {
  std::vector<T> out;
  for (const auto& item : split(raw)) out.push_back(parse_number<T>(key, item));
  if (out.empty()) throw ConfigError("'" + key + "': empty list");
  return out;
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ",";
    if constexpr (std::is_floating_point_v<T>)
      s += fmt(v[k]);
    else
      s += std::to_string(v[k]);
  }
  return s;
}

// Binds "section.key" to a field of ScenarioConfig in both directions.
struct Binding {
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <class T, class Access>
Binding number(const std::string& key, Access access) {
  return {[key, access](ScenarioConfig& c, const std::string& raw) { access(c) = parse_number<T>(key, raw); },
          [access](const ScenarioConfig& c) {
            ScenarioConfig copy = c;
            const T v = access(copy);
            if constexpr (std::is_floating_point_v<T>)
              return fmt(v);
            else
              return std::to_string(v);
          }};
}

inline const std::map<std::string, Binding>& bindings() {
  static const std::map<std::string, Binding> table = [] {
    std::map<std::string, Binding> b;
    b["scenario.n_vehicles"] = number<int>("scenario.n_vehicles", [](ScenarioConfig& c) -> int& { return c.n_vehicles; });
    b["scenario.mode"] = {[](ScenarioConfig& c, const std::string& raw) {
                            try {
                              c.mode = parse_mode(trim(raw));
                            } catch (const std::invalid_argument& e) {
                              throw ConfigError(std::string("'scenario.mode': ") + e.what());
                            }
                          },
                          [](const ScenarioConfig& c) { return std::string(to_string(c.mode)); }};
    b["scenario.duration_s"] = number<double>("scenario.duration_s", [](ScenarioConfig& c) -> double& { return c.duration_s; });
    b["scenario.seed"] = number<std::uint64_t>("scenario.seed", [](ScenarioConfig& c) -> std::uint64_t& { return c.seed; });
    b["scenario.warmup_subframes"] =
        number<int>("scenario.warmup_subframes", [](ScenarioConfig& c) -> int& { return c.warmup_subframes; });
    b["scenario.message_size_bytes"] =
        number<int>("scenario.message_size_bytes", [](ScenarioConfig& c) -> int& { return c.message_size_bytes; });
    b["scenario.mcs"] = number<int>("scenario.mcs", [](ScenarioConfig& c) -> int& { return c.mcs; });
    b["scenario.d_list"] = {
        [](ScenarioConfig& c, const std::string& raw) { c.d_list = parse_list<double>("scenario.d_list", raw); },
        [](const ScenarioConfig& c) { return join(c.d_list); }};
    b["scenario.aoi_th_list"] = {
        [](ScenarioConfig& c, const std::string& raw) { c.aoi_th_list = parse_list<int>("scenario.aoi_th_list", raw); },
        [](const ScenarioConfig& c) { return join(c.aoi_th_list); }};

    b["pool.sc"] = number<int>("pool.sc", [](ScenarioConfig& c) -> int& { return c.pool.sc; });
    b["pool.rt"] = number<int>("pool.rt", [](ScenarioConfig& c) -> int& { return c.pool.rt; });
    b["pool.t1"] = number<int>("pool.t1", [](ScenarioConfig& c) -> int& { return c.pool.t1; });
    b["pool.t2"] = number<int>("pool.t2", [](ScenarioConfig& c) -> int& { return c.pool.t2; });
    b["pool.rc_min"] = number<int>("pool.rc_min", [](ScenarioConfig& c) -> int& { return c.pool.rc_min; });
    b["pool.rc_max"] = number<int>("pool.rc_max", [](ScenarioConfig& c) -> int& { return c.pool.rc_max; });
    b["pool.beta"] = number<double>("pool.beta", [](ScenarioConfig& c) -> double& { return c.pool.beta; });
    b["pool.p_th_init_dbm"] = number<double>("pool.p_th_init_dbm", [](ScenarioConfig& c) -> double& { return c.pool.p_th_init_dbm; });

    b["link.tx_power_dbm"] = number<double>("link.tx_power_dbm", [](ScenarioConfig& c) -> double& { return c.link.tx_power_dbm; });
    b["link.fc_ghz"] = number<double>("link.fc_ghz", [](ScenarioConfig& c) -> double& { return c.link.fc_ghz; });
    b["link.bandwidth_hz"] = number<double>("link.bandwidth_hz", [](ScenarioConfig& c) -> double& { return c.link.bandwidth_hz; });
    b["link.noise_figure_db"] =
        number<double>("link.noise_figure_db", [](ScenarioConfig& c) -> double& { return c.link.noise_figure_db; });
    b["link.sinr_threshold_tb_db"] =
        number<double>("link.sinr_threshold_tb_db", [](ScenarioConfig& c) -> double& { return c.link.sinr_threshold_tb_db; });
    b["link.sinr_threshold_sci_db"] = number<double>(
        "link.sinr_threshold_sci_db", [](ScenarioConfig& c) -> double& { return c.link.sinr_threshold_sci_db; });
    b["link.rsrp_offset_db"] =
        number<double>("link.rsrp_offset_db", [](ScenarioConfig& c) -> double& { return c.link.rsrp_offset_db; });
    b["link.shadowing"] = {[](ScenarioConfig& c, const std::string& raw) { c.link.shadowing = parse_bool("link.shadowing", raw); },
                           [](const ScenarioConfig& c) { return std::string(c.link.shadowing ? "true" : "false"); }};
    b["link.shadowing_sigma_db"] =
        number<double>("link.shadowing_sigma_db", [](ScenarioConfig& c) -> double& { return c.link.shadowing_sigma_db; });

    b["mobility.rows"] = number<int>("mobility.rows", [](ScenarioConfig& c) -> int& { return c.mobility.rows; });
    b["mobility.cols"] = number<int>("mobility.cols", [](ScenarioConfig& c) -> int& { return c.mobility.cols; });
    b["mobility.block_m"] = number<double>("mobility.block_m", [](ScenarioConfig& c) -> double& { return c.mobility.block_m; });
    b["mobility.step_s"] = number<double>("mobility.step_s", [](ScenarioConfig& c) -> double& { return c.mobility.step_s; });
    b["mobility.accel"] = number<double>("mobility.accel", [](ScenarioConfig& c) -> double& { return c.mobility.krauss.accel; });
    b["mobility.decel"] = number<double>("mobility.decel", [](ScenarioConfig& c) -> double& { return c.mobility.krauss.decel; });
    b["mobility.v_max"] = number<double>("mobility.v_max", [](ScenarioConfig& c) -> double& { return c.mobility.krauss.v_max; });
    b["mobility.tau"] = number<double>("mobility.tau", [](ScenarioConfig& c) -> double& { return c.mobility.krauss.tau; });
    b["mobility.eta"] = number<double>("mobility.eta", [](ScenarioConfig& c) -> double& { return c.mobility.krauss.eta; });
    b["mobility.length"] = number<double>("mobility.length", [](ScenarioConfig& c) -> double& { return c.mobility.krauss.length; });
    b["mobility.min_gap"] =
        number<double>("mobility.min_gap", [](ScenarioConfig& c) -> double& { return c.mobility.krauss.min_gap; });
    return b;
  }();
  return table;
}

}  // namespace detail

/// Sets one "section.key" value on top of `cfg`.
inline void apply(ScenarioConfig& cfg, const std::string& dotted_key, const std::string& value) {
  const auto& b = detail::bindings();
  const auto it = b.find(dotted_key);
  if (it == b.end()) throw ConfigError("unknown configuration key '" + dotted_key + "'");
  it->second.set(cfg, value);
}

inline ScenarioConfig parse(std::istream& in, const std::string& origin = "<stream>") {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ScenarioConfig cfg;
  static const std::set<std::string> known{"scenario", "pool", "link", "mobility"};
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(origin + ": key '" + section + "' must live inside a section");
    if (!known.contains(section)) throw ConfigError(origin + ": unknown section [" + section + "]");
    for (const auto& [key, value] : body) apply(cfg, section + "." + key, value.data());
  }
  return cfg;
}

inline ScenarioConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse(in, path);
}

/// Canonical text form; parse(to_ini(c)) == c field for field.
inline std::string to_ini(const ScenarioConfig& cfg) {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  for (const auto& [dotted, binding] : detail::bindings()) {
    const auto dot = dotted.find('.');
    sections[dotted.substr(0, dot)].emplace_back(dotted.substr(dot + 1), binding.get(cfg));
  }
  std::string out;
  for (const char* name : {"scenario", "pool", "link", "mobility"}) {
    out += "[" + std::string(name) + "]\n";
    for (const auto& [k, v] : sections[name]) out += k + " = " + v + "\n";
    out += "\n";
  }
  return out;
}

/// FNV-1a over the canonical text.
inline std::uint64_t hash(const ScenarioConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : to_ini(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace cv2x::config
