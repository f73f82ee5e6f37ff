#pragma once

// One spoofing scenario: configuration, validation, the H0 fingerprint
// used to key thresholds, and the derived quantities trials share.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scer/attack.hpp"
#include "scer/channel.hpp"
#include "scer/detector.hpp"
#include "scer/waveform.hpp"

namespace scer {

enum class EndWindowPolicy { same_symbol_tail, random_predictable_symbol };

/// How a trial produces partial correlations. `samples` synthesizes every
/// window sample and correlates; `correlator` draws the correlator outputs
/// from their exact distribution (noise summed against a +-1 replica is
/// Gaussian with variance N sigma^2), keeping the per-sample spoofer trace.
enum class Synthesis { samples, correlator };

struct ScenarioConfig {
  double sample_rate_hz = kDefaultSampleRate;
  double cn0_detector_real_dbhz = 40.0;
  double cn0_detector_spoof_dbhz = 40.0;
  double cn0_spoofer_real_dbhz = 40.0;
  double window_begin_s = 250e-6;
  double window_end_s = 250e-6;
  std::int64_t n_symbols = 100;
  AttackModel attack;
  ChannelModel channel;
  EndWindowPolicy end_window_policy = EndWindowPolicy::same_symbol_tail;
  Synthesis synthesis = Synthesis::samples;
  std::uint64_t master_seed = 1;

  double noise_variance() const { return channel.noise_variance.value_or(sample_rate_hz); }
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Collects every violated constraint as "field: problem" lines.
inline std::vector<std::string> config_problems(const ScenarioConfig& c) {
  std::vector<std::string> out;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) out.push_back(msg);
  };
  need(std::isfinite(c.sample_rate_hz) && c.sample_rate_hz > 0.0, "sample_rate_hz: must be positive");
  need(std::isfinite(c.cn0_detector_real_dbhz), "cn0_detector_real_dbhz: must be finite");
  need(std::isfinite(c.cn0_detector_spoof_dbhz), "cn0_detector_spoof_dbhz: must be finite");
  need(std::isfinite(c.cn0_spoofer_real_dbhz), "cn0_spoofer_real_dbhz: must be finite");
  need(c.window_begin_s > 0.0, "window_begin_s: must be positive");
  need(c.window_end_s > 0.0, "window_end_s: must be positive");
  need(c.window_begin_s + c.window_end_s <= kSymbolDuration + 1e-12,
       "window_begin_s + window_end_s: must not exceed the 4 ms symbol");
  need(c.n_symbols >= 1, "n_symbols: must be >= 1");
  if (out.empty() && c.sample_rate_hz > 0.0) {
    need(window_samples(c.window_begin_s, c.sample_rate_hz) >= 1, "window_begin_s: shorter than one sample");
    need(window_samples(c.window_end_s, c.sample_rate_hz) >= 1, "window_end_s: shorter than one sample");
  }
  if (c.attack.kind == AttackKind::random_value || c.attack.kind == AttackKind::zero_value) {
    if (c.attack.guess_duration_s)
      need(*c.attack.guess_duration_s > 0.0 && *c.attack.guess_duration_s < kSymbolDuration,
           "attack.guess_duration_s: must lie in (0, 4 ms)");
  }
  if (c.channel.noise_variance) need(*c.channel.noise_variance > 0.0, "channel.noise_variance: must be positive");
  if (c.channel.kind == ChannelKind::lms) {
    try {
      validate(c.channel.lms);
    } catch (const std::invalid_argument& e) {
      out.push_back(std::string("channel.") + e.what());
    }
  }
  return out;
}

inline void validate(const ScenarioConfig& c) {
  const auto problems = config_problems(c);
  if (problems.empty()) return;
  std::string msg = "invalid scenario:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw ConfigError(msg);
}

/// FNV-1a over a canonical text rendering of the fields that shape the H0
/// statistic distributions (the spoofer and the seed do not).
inline std::uint64_t fingerprint(const ScenarioConfig& c) {
  std::string canon;
  char buf[64];
  auto num = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    canon += key;
    canon += '=';
    canon += buf;
    canon += ';';
  };
  num("fs", c.sample_rate_hz);
  num("cn0_dr", c.cn0_detector_real_dbhz);
  num("wb", c.window_begin_s);
  num("we", c.window_end_s);
  num("nb", static_cast<double>(c.n_symbols));
  num("sigma2", c.noise_variance());
  num("noise", c.channel.noise_enabled ? 1.0 : 0.0);
  num("policy", static_cast<double>(c.end_window_policy));
  num("synthesis", static_cast<double>(c.synthesis));
  num("channel", static_cast<double>(c.channel.kind));
  if (c.channel.kind == ChannelKind::lms) {
    const auto& l = c.channel.lms;
    for (const auto* s : {&l.good, &l.bad}) {
      num("mu", s->direct_mean_db);
      num("sd", s->shadow_std_db);
      num("mp", s->multipath_power_db);
      num("dwell", s->mean_dwell_s);
    }
    num("v", l.receiver_speed_mps);
    num("fc", l.carrier_freq_hz);
    num("dcorr", l.shadow_corr_distance_m);
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string fingerprint_hex(std::uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

inline WindowSpec begin_window(const ScenarioConfig& c) {
  return {WindowKind::begin, 0, window_samples(c.window_begin_s, c.sample_rate_hz)};
}

inline WindowSpec end_window(const ScenarioConfig& c) {
  const auto len = window_samples(c.window_end_s, c.sample_rate_hz);
  return {WindowKind::end, symbol_samples(c.sample_rate_hz) - len, len};
}

/// Authentic-signal window at the detector: A * gain * b * c(n).
inline ComplexSampleBlock synthesize_real_window(const ScenarioConfig& config, const SpreadingCode& code,
                                                 int symbol, const WindowSpec& window, cplx gain) {
  if (symbol != 1 && symbol != -1) throw std::invalid_argument("synthesize_real_window: symbol must be +-1");
  const auto chips = code_samples(code, window, config.sample_rate_hz);
  return synthesize_signal_window(amplitude_from_cn0(config.cn0_detector_real_dbhz), gain, symbol, chips,
                                  window, config.sample_rate_hz);
}

inline DetectorStatistics compute_statistics(std::span<const PartialCorrelationPair> pairs,
                                             const ScenarioConfig& config) {
  return compute_statistics(pairs, config.window_begin_s, config.window_end_s);
}

/// Everything a trial needs that does not change between trials.
struct Scenario {
  ScenarioConfig config;
  SpreadingCode code;
  WindowSpec begin;
  WindowSpec end;
  std::vector<std::int8_t> begin_chips;
  std::vector<std::int8_t> end_chips;
  double amplitude_real = 0.0;   // A
  double amplitude_spoof = 0.0;  // beta
  double sigma2 = 0.0;
  std::size_t guess_boundary = 0;
  double end_window_start_s = 0.0;
  std::uint64_t fingerprint = 0;

  explicit Scenario(ScenarioConfig c) : config(std::move(c)) {
    validate(config);
    const double fs = config.sample_rate_hz;
    code = generate_code(derive_seed(config.master_seed, {static_cast<std::uint64_t>(StreamKind::code)}));
    begin = begin_window(config);
    end = end_window(config);
    begin_chips = code_samples(code, begin, fs);
    end_chips = code_samples(code, end, fs);
    amplitude_real = amplitude_from_cn0(config.cn0_detector_real_dbhz);
    amplitude_spoof = amplitude_from_cn0(config.cn0_detector_spoof_dbhz);
    sigma2 = config.noise_variance();
    if (config.attack.kind == AttackKind::random_value || config.attack.kind == AttackKind::zero_value)
      guess_boundary = guess_samples(resolved_guess_duration(config.attack, config.cn0_spoofer_real_dbhz), fs);
    end_window_start_s = static_cast<double>(end.start) / fs;
    fingerprint = scer::fingerprint(config);
  }
};

}  // namespace scer
