#pragma once

// JSON scenario files. Every key is optional (defaults come from
// ScenarioConfig); unknown keys and wrong types are rejected with the
// offending field path.

#include <array>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scer/scenario.hpp"

namespace scer {

using json = nlohmann::json;

namespace detail {

struct JsonReader {
  std::vector<std::string> problems;

  void reject_unknown(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (auto a : allowed) ok = ok || it.key() == a;
      if (!ok) problems.push_back(path + it.key() + ": unknown key");
    }
  }

  bool object(const json& obj, const std::string& path) {
    if (obj.is_object()) return true;
    problems.push_back(path + ": expected an object");
    return false;
  }

  void number(const json& obj, const char* key, const std::string& path, double& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (v.is_number()) out = v.get<double>();
    else problems.push_back(path + key + ": expected a number");
  }

  void integer(const json& obj, const char* key, const std::string& path, std::int64_t& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (v.is_number_integer()) out = v.get<std::int64_t>();
    else problems.push_back(path + key + ": expected an integer");
  }

  void unsigned_integer(const json& obj, const char* key, const std::string& path, std::uint64_t& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) out = v.get<std::uint64_t>();
    else problems.push_back(path + key + ": expected a non-negative integer");
  }

  void boolean(const json& obj, const char* key, const std::string& path, bool& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (v.is_boolean()) out = v.get<bool>();
    else problems.push_back(path + key + ": expected true or false");
  }

  template <class E, std::size_t N>
  void enumeration(const json& obj, const char* key, const std::string& path, E& out,
                   const std::array<std::pair<std::string_view, E>, N>& names) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      for (const auto& [n, e] : names)
        if (s == n) {
          out = e;
          return;
        }
    }
    std::string valid;
    for (const auto& [n, e] : names) valid += (valid.empty() ? "" : ", ") + std::string(n);
    problems.push_back(path + key + ": expected one of " + valid);
  }
};

inline constexpr std::array<std::pair<std::string_view, AttackKind>, 4> kAttackNames = {{
    {"none", AttackKind::none},
    {"estimated_value", AttackKind::estimated_value},
    {"random_value", AttackKind::random_value},
    {"zero_value", AttackKind::zero_value}}};

inline constexpr std::array<std::pair<std::string_view, ChannelKind>, 2> kChannelNames = {{
    {"awgn", ChannelKind::awgn}, {"lms", ChannelKind::lms}}};

inline constexpr std::array<std::pair<std::string_view, EndWindowPolicy>, 2> kPolicyNames = {{
    {"same_symbol_tail", EndWindowPolicy::same_symbol_tail},
    {"random_predictable_symbol", EndWindowPolicy::random_predictable_symbol}}};

inline constexpr std::array<std::pair<std::string_view, Synthesis>, 2> kSynthesisNames = {{
    {"samples", Synthesis::samples}, {"correlator", Synthesis::correlator}}};

template <class E, std::size_t N>
std::string enum_name(E e, const std::array<std::pair<std::string_view, E>, N>& names) {
  for (const auto& [n, v] : names)
    if (v == e) return std::string(n);
  return "?";
}

inline void read_lms_state(JsonReader& r, const json& j, const std::string& path, LmsStateParams& s) {
  if (!r.object(j, path)) return;
  r.reject_unknown(j, path + ".", {"direct_mean_db", "shadow_std_db", "multipath_power_db", "mean_dwell_s"});
  r.number(j, "direct_mean_db", path + ".", s.direct_mean_db);
  r.number(j, "shadow_std_db", path + ".", s.shadow_std_db);
  r.number(j, "multipath_power_db", path + ".", s.multipath_power_db);
  r.number(j, "mean_dwell_s", path + ".", s.mean_dwell_s);
}

inline json lms_state_json(const LmsStateParams& s) {
  return {{"direct_mean_db", s.direct_mean_db},
          {"shadow_std_db", s.shadow_std_db},
          {"multipath_power_db", s.multipath_power_db},
          {"mean_dwell_s", s.mean_dwell_s}};
}

}  // namespace detail

/// Parses and validates; throws ConfigError listing every problem.
inline ScenarioConfig config_from_json(const json& j) {
  detail::JsonReader r;
  ScenarioConfig c;
  if (!r.object(j, "config")) throw ConfigError("invalid scenario:\n  config: expected a JSON object");
  r.reject_unknown(j, "",
                   {"name", "sample_rate_hz", "cn0_detector_real_dbhz", "cn0_detector_spoof_dbhz",
                    "cn0_spoofer_real_dbhz", "window_begin_s", "window_end_s", "n_symbols", "attack", "channel",
                    "end_window_policy", "synthesis", "master_seed"});
  if (j.contains("name") && !j.at("name").is_string()) r.problems.push_back("name: expected a string");
  r.number(j, "sample_rate_hz", "", c.sample_rate_hz);
  r.number(j, "cn0_detector_real_dbhz", "", c.cn0_detector_real_dbhz);
  r.number(j, "cn0_detector_spoof_dbhz", "", c.cn0_detector_spoof_dbhz);
  r.number(j, "cn0_spoofer_real_dbhz", "", c.cn0_spoofer_real_dbhz);
  r.number(j, "window_begin_s", "", c.window_begin_s);
  r.number(j, "window_end_s", "", c.window_end_s);
  r.integer(j, "n_symbols", "", c.n_symbols);
  r.enumeration(j, "end_window_policy", "", c.end_window_policy, detail::kPolicyNames);
  r.enumeration(j, "synthesis", "", c.synthesis, detail::kSynthesisNames);
  r.unsigned_integer(j, "master_seed", "", c.master_seed);

  if (j.contains("attack") && r.object(j.at("attack"), "attack")) {
    const auto& a = j.at("attack");
    r.reject_unknown(a, "attack.", {"kind", "guess_duration_s"});
    r.enumeration(a, "kind", "attack.", c.attack.kind, detail::kAttackNames);
    if (a.contains("guess_duration_s") && !a.at("guess_duration_s").is_null()) {
      double g = 0.0;
      r.number(a, "guess_duration_s", "attack.", g);
      c.attack.guess_duration_s = g;
    }
  }
  if (j.contains("channel") && r.object(j.at("channel"), "channel")) {
    const auto& ch = j.at("channel");
    r.reject_unknown(ch, "channel.", {"kind", "noise_enabled", "noise_variance", "lms"});
    r.enumeration(ch, "kind", "channel.", c.channel.kind, detail::kChannelNames);
    r.boolean(ch, "noise_enabled", "channel.", c.channel.noise_enabled);
    if (ch.contains("noise_variance") && !ch.at("noise_variance").is_null()) {
      double v = 0.0;
      r.number(ch, "noise_variance", "channel.", v);
      c.channel.noise_variance = v;
    }
    if (ch.contains("lms") && r.object(ch.at("lms"), "channel.lms")) {
      const auto& l = ch.at("lms");
      r.reject_unknown(l, "channel.lms.",
                       {"good", "bad", "receiver_speed_mps", "carrier_freq_hz", "shadow_corr_distance_m"});
      if (l.contains("good")) detail::read_lms_state(r, l.at("good"), "channel.lms.good", c.channel.lms.good);
      if (l.contains("bad")) detail::read_lms_state(r, l.at("bad"), "channel.lms.bad", c.channel.lms.bad);
      r.number(l, "receiver_speed_mps", "channel.lms.", c.channel.lms.receiver_speed_mps);
      r.number(l, "carrier_freq_hz", "channel.lms.", c.channel.lms.carrier_freq_hz);
      r.number(l, "shadow_corr_distance_m", "channel.lms.", c.channel.lms.shadow_corr_distance_m);
    }
  }
  if (r.problems.empty()) {
    const auto more = config_problems(c);
    r.problems.insert(r.problems.end(), more.begin(), more.end());
  }
  if (!r.problems.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& p : r.problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return c;
}

/// Fully resolved configuration (defaults filled in).
inline json config_to_json(const ScenarioConfig& c) {
  json attack = {{"kind", detail::enum_name(c.attack.kind, detail::kAttackNames)}};
  if (c.attack.guess_duration_s) attack["guess_duration_s"] = *c.attack.guess_duration_s;
  json channel = {{"kind", detail::enum_name(c.channel.kind, detail::kChannelNames)},
                  {"noise_enabled", c.channel.noise_enabled},
                  {"noise_variance", c.noise_variance()}};
  if (c.channel.kind == ChannelKind::lms) {
    const auto& l = c.channel.lms;
    channel["lms"] = {{"good", detail::lms_state_json(l.good)},
                      {"bad", detail::lms_state_json(l.bad)},
                      {"receiver_speed_mps", l.receiver_speed_mps},
                      {"carrier_freq_hz", l.carrier_freq_hz},
                      {"shadow_corr_distance_m", l.shadow_corr_distance_m}};
  }
  return {{"sample_rate_hz", c.sample_rate_hz},
          {"cn0_detector_real_dbhz", c.cn0_detector_real_dbhz},
          {"cn0_detector_spoof_dbhz", c.cn0_detector_spoof_dbhz},
          {"cn0_spoofer_real_dbhz", c.cn0_spoofer_real_dbhz},
          {"window_begin_s", c.window_begin_s},
          {"window_end_s", c.window_end_s},
          {"n_symbols", c.n_symbols},
          {"attack", attack},
          {"channel", channel},
          {"end_window_policy", detail::enum_name(c.end_window_policy, detail::kPolicyNames)},
          {"synthesis", detail::enum_name(c.synthesis, detail::kSynthesisNames)},
          {"master_seed", c.master_seed}};
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace scer
