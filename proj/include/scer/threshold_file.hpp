#pragma once

// Versioned key-value threshold files:
//
//   # scer threshold file
//   format_version = 1
//   [set]
//   fingerprint = 3f0c...
//   n_b = 110
//   target_pfa = 0.02
//   method = empirical
//   h0_trials = 10000
//   gamma.R1 = 1.0992...      ("invalid" when no threshold exists)
//   ...
//   rayleigh.R3 = 13489.2...  (optional)

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "scer/calibration.hpp"

namespace scer {

inline constexpr int kThresholdFormatVersion = 1;

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

inline void write_thresholds(std::ostream& out, const ThresholdTable& table) {
  out << "# scer threshold file\n";
  out << "format_version = " << kThresholdFormatVersion << "\n";
  for (const auto& s : table.sets) {
    out << "\n[set]\n";
    out << "fingerprint = " << fingerprint_hex(s.fingerprint) << "\n";
    out << "n_b = " << s.n_b << "\n";
    out << "target_pfa = " << detail::fmt_double(s.target_pfa) << "\n";
    out << "method = " << method_name(s.method) << "\n";
    out << "h0_trials = " << s.h0_trials << "\n";
    for (auto d : kAllDetectors) {
      const auto i = static_cast<std::size_t>(d);
      out << "gamma." << detector_name(d) << " = " << (s.valid[i] ? detail::fmt_double(s.gamma[i]) : "invalid")
          << "\n";
    }
    if (s.rayleigh_r3) out << "rayleigh.R3 = " << detail::fmt_double(*s.rayleigh_r3) << "\n";
  }
}

inline ThresholdTable read_thresholds(std::istream& in) {
  ThresholdTable table;
  ThresholdSet* cur = nullptr;
  bool version_seen = false;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw std::runtime_error("threshold file line " + std::to_string(lineno) + ": " + msg);
  };
  auto to_double = [&](const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') fail("'" + v + "' is not a number");
    return x;
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line == "[set]") {
      if (!version_seen) fail("format_version must precede the first set");
      table.sets.emplace_back();
      cur = &table.sets.back();
      cur->valid.fill(false);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key == "format_version") {
      if (value != std::to_string(kThresholdFormatVersion)) fail("unsupported format_version " + value);
      version_seen = true;
      continue;
    }
    if (!cur) fail("key '" + key + "' outside a [set]");
    if (key == "fingerprint") {
      cur->fingerprint = std::stoull(value, nullptr, 16);
    } else if (key == "n_b") {
      cur->n_b = std::stoll(value);
    } else if (key == "target_pfa") {
      cur->target_pfa = to_double(value);
    } else if (key == "method") {
      if (value == "empirical") cur->method = ThresholdMethod::empirical;
      else if (value == "rayleigh") cur->method = ThresholdMethod::rayleigh;
      else fail("unknown method '" + value + "'");
    } else if (key == "h0_trials") {
      cur->h0_trials = std::stoll(value);
    } else if (key.rfind("gamma.", 0) == 0) {
      const auto d = static_cast<std::size_t>(parse_detector(key.substr(6)));
      if (value == "invalid") {
        cur->valid[d] = false;
        cur->gamma[d] = std::numeric_limits<double>::quiet_NaN();
      } else {
        cur->valid[d] = true;
        cur->gamma[d] = to_double(value);
      }
    } else if (key == "rayleigh.R3") {
      cur->rayleigh_r3 = to_double(value);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!version_seen) throw std::runtime_error("threshold file has no format_version");
  return table;
}

inline void save_thresholds(const std::string& path, const ThresholdTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write threshold file '" + path + "'");
  write_thresholds(out, table);
}

inline ThresholdTable load_thresholds(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open threshold file '" + path + "'");
  return read_thresholds(in);
}

/// Loads and checks that a set exists for `config`; a file calibrated for
/// another scenario is an error.
inline ThresholdTable load_thresholds(const std::string& path, const ScenarioConfig& config) {
  auto table = load_thresholds(path);
  (void)table.for_config(config);
  return table;
}

}  // namespace scer
