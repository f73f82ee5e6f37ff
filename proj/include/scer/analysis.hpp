#pragma once

// Closed-form timing and protocol-budget calculators: how long a spoofer
// must observe a symbol to decide it, how long a receiver clock hides a
// growing delay, and how many unpredictable symbols OSNMA delivers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace scer {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Inverse complementary error function on (0, 2).
///
/// A rational starting point (Giles' single-precision erfinv polynomial,
/// evaluated on the erfc argument so small inputs keep their precision) is
/// polished with two Halley steps on erfc(x) - y.
inline double erfc_inv(double y) {
  if (!(y >= 0.0 && y <= 2.0)) throw std::domain_error("erfc_inv: argument outside [0, 2]");
  if (y == 0.0) return std::numeric_limits<double>::infinity();
  if (y == 2.0) return -std::numeric_limits<double>::infinity();
  if (y > 1.0) return -erfc_inv(2.0 - y);
  if (y == 1.0) return 0.0;

  double w = -std::log(y * (2.0 - y));
  double p;
  if (w < 5.0) {
    w -= 2.5;
    p = 2.81022636e-08;
    p = 3.43273939e-07 + p * w;
    p = -3.5233877e-06 + p * w;
    p = -4.39150654e-06 + p * w;
    p = 0.00021858087 + p * w;
    p = -0.00125372503 + p * w;
    p = -0.00417768164 + p * w;
    p = 0.246640727 + p * w;
    p = 1.50140941 + p * w;
  } else {
    w = std::sqrt(w) - 3.0;
    p = -0.000200214257;
    p = 0.000100950558 + p * w;
    p = 0.00134934322 + p * w;
    p = -0.00367342844 + p * w;
    p = 0.00573950773 + p * w;
    p = -0.0076224613 + p * w;
    p = 0.00943887047 + p * w;
    p = 1.00167406 + p * w;
    p = 2.83297682 + p * w;
  }
  double x = p * (1.0 - y);

  const double two_over_sqrt_pi = 2.0 * std::numbers::inv_sqrtpi;
  for (int i = 0; i < 2; ++i) {
    const double f = std::erfc(x) - y;
    const double fp = -two_over_sqrt_pi * std::exp(-x * x);
    const double ratio = f / fp;
    x -= ratio / (1.0 + x * ratio);
  }
  return x;
}

/// Time the spoofer must integrate to decide a BPSK symbol with error
/// probability `pe` at the given C/N0: (erfc^-1(2 pe))^2 / (C/N0).
inline double spoofer_decision_time(double cn0_dbhz, double pe) {
  if (!(pe > 0.0 && pe < 0.5))
    throw std::invalid_argument("spoofer_decision_time: pe must lie in (0, 0.5); a sign decision at "
                                "pe >= 0.5 is no better than chance");
  if (!std::isfinite(cn0_dbhz)) throw std::invalid_argument("spoofer_decision_time: cn0 not finite");
  const double e = erfc_inv(2.0 * pe);
  return e * e / db_to_linear(cn0_dbhz);
}

/// Uncoded BPSK error after coherent integration over `t` seconds.
inline double symbol_error_prob(double cn0_dbhz, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("symbol_error_prob: t must be >= 0");
  if (cn0_dbhz == std::numeric_limits<double>::infinity()) return t > 0.0 ? 0.0 : 0.5;
  return 0.5 * std::erfc(std::sqrt(db_to_linear(cn0_dbhz) * t));
}

/// Wall-clock time a clock of the given fractional stability needs to
/// accumulate `delay_s` of drift unnoticed.
inline double clock_masking_time(double delay_s, double stability) {
  if (!(delay_s > 0.0) || !(stability > 0.0))
    throw std::invalid_argument("clock_masking_time: delay and stability must be positive");
  return delay_s / stability;
}

struct TimingAnalysis {
  double cn0_dbhz = 0.0;
  double pe = 0.0;
  double t_spof = 0.0;
  double clock_stability = 0.0;
  double masking_time = 0.0;
};

inline TimingAnalysis analyze_timing(double cn0_dbhz, double pe, double stability) {
  TimingAnalysis t;
  t.cn0_dbhz = cn0_dbhz;
  t.pe = pe;
  t.t_spof = spoofer_decision_time(cn0_dbhz, pe);
  t.clock_stability = stability;
  t.masking_time = clock_masking_time(t.t_spof, stability);
  return t;
}

enum class KeyAssumption { predictable, first_64_unpredictable };

struct OsnmaConfig {
  int mack_blocks_per_30s = 2;
  int mac_bits = 20;
  int macs_per_block = 4;
  int key_bits = 96;
  KeyAssumption key_assumption = KeyAssumption::predictable;

  double block_period_s() const { return 30.0 / mack_blocks_per_30s; }
};

inline void validate(const OsnmaConfig& cfg) {
  if (cfg.mack_blocks_per_30s <= 0 || cfg.mac_bits <= 0 || cfg.macs_per_block <= 0 ||
      cfg.key_bits <= 0)
    throw std::invalid_argument("OsnmaConfig: all counts must be positive");
}

/// Unpredictable symbols carried by one MACK block.
inline std::int64_t osnma_symbols_per_block(const OsnmaConfig& cfg) {
  validate(cfg);
  std::int64_t n = static_cast<std::int64_t>(cfg.macs_per_block) * cfg.mac_bits;
  if (cfg.key_assumption == KeyAssumption::first_64_unpredictable)
    n += std::min(cfg.key_bits, 64);
  return n;
}

inline std::int64_t osnma_symbol_budget(const OsnmaConfig& cfg, double duration_s) {
  const double period = cfg.block_period_s();
  const double blocks = duration_s / period;
  const double rounded = std::round(blocks);
  if (!(duration_s >= 0.0) || std::abs(blocks - rounded) > 1e-9)
    throw std::invalid_argument("osnma_symbol_budget: duration " + std::to_string(duration_s) +
                                " s is not a multiple of the " + std::to_string(period) +
                                " s MACK block period");
  return osnma_symbols_per_block(cfg) * static_cast<std::int64_t>(rounded);
}

struct DetectionTime {
  double seconds = 0.0;
  std::int64_t blocks = 0;
  std::int64_t symbols_available = 0;
  /// masking_time - seconds, when a timing analysis was supplied.
  std::optional<double> margin_s;
};

/// Smallest whole number of MACK blocks whose symbol budget covers
/// `required_symbols`.
inline DetectionTime time_to_detect(std::int64_t required_symbols, const OsnmaConfig& cfg,
                                    const std::optional<TimingAnalysis>& timing = std::nullopt) {
  if (required_symbols < 1) throw std::invalid_argument("time_to_detect: required_symbols must be >= 1");
  const std::int64_t per_block = osnma_symbols_per_block(cfg);
  DetectionTime out;
  out.blocks = (required_symbols + per_block - 1) / per_block;
  out.seconds = static_cast<double>(out.blocks) * cfg.block_period_s();
  out.symbols_available = out.blocks * per_block;
  if (timing) out.margin_s = timing->masking_time - out.seconds;
  return out;
}

}  // namespace scer
