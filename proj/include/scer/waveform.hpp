#pragma once

// Baseband sample synthesis for one satellite's E1B-like data component:
// a seeded binary spreading code on a BOC(1,1) square-wave subcarrier,
// sampled over sub-symbol windows.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scer/random.hpp"

namespace scer {

using cplx = std::complex<double>;

inline constexpr double kSymbolDuration = 4e-3;
inline constexpr double kSymbolRate = 250.0;
inline constexpr double kChipRate = 1.023e6;
inline constexpr double kSubcarrierHz = 1.023e6;
inline constexpr std::size_t kCodeLength = 4092;
inline constexpr double kDefaultSampleRate = 4.092e6;

/// sqrt(C/N0) under the unit noise-PSD convention (N0 = 1, per-sample
/// complex noise variance equal to the sample rate).
inline double amplitude_from_cn0(double cn0_dbhz) {
  if (!std::isfinite(cn0_dbhz)) throw std::invalid_argument("amplitude_from_cn0: C/N0 must be finite");
  return std::sqrt(std::pow(10.0, cn0_dbhz / 10.0));
}

struct SpreadingCode {
  std::vector<std::int8_t> chips;
  double chip_rate_hz = kChipRate;
  double boc_subcarrier_hz = kSubcarrierHz;
  std::uint64_t seed = 0;

  /// chip(n) times the square-wave subcarrier at sample n.
  int sample(std::size_t n, double sample_rate_hz) const {
    const double t = static_cast<double>(n) / sample_rate_hz;
    const auto chip_index =
        static_cast<std::size_t>(std::floor(t * chip_rate_hz + 1e-9)) % chips.size();
    const auto half_periods = static_cast<std::uint64_t>(std::floor(2.0 * t * boc_subcarrier_hz + 1e-9));
    const int sub = (half_periods % 2 == 0) ? 1 : -1;
    return chips[chip_index] * sub;
  }
};

inline SpreadingCode generate_code(std::uint64_t seed, std::size_t length_chips = kCodeLength) {
  if (length_chips < 1) throw std::invalid_argument("generate_code: length must be >= 1");
  SpreadingCode code;
  code.seed = seed;
  code.chips.resize(length_chips);
  RandomStream rng(derive_seed(seed, {static_cast<std::uint64_t>(StreamKind::code)}));
  for (auto& c : code.chips) c = static_cast<std::int8_t>(rng.sign());
  return code;
}

/// Symbols of one unpredictable-symbol run; flags mark which ones the
/// detector treats as unpredictable.
struct SymbolStream {
  std::vector<std::int8_t> symbols;
  std::vector<bool> unpredictable;
  double symbol_rate = kSymbolRate;
};

enum class WindowKind { begin, end };

/// A window inside one 4 ms symbol, in samples.
struct WindowSpec {
  WindowKind kind = WindowKind::begin;
  std::size_t start = 0;
  std::size_t length = 0;
};

inline std::size_t symbol_samples(double sample_rate_hz) {
  return static_cast<std::size_t>(std::llround(kSymbolDuration * sample_rate_hz));
}

inline std::size_t window_samples(double duration_s, double sample_rate_hz) {
  return static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
}

inline void check_window(const WindowSpec& w, double sample_rate_hz) {
  if (w.length < 1) throw std::invalid_argument("window has no samples");
  if (w.start + w.length > symbol_samples(sample_rate_hz))
    throw std::out_of_range("window [" + std::to_string(w.start) + ", " +
                            std::to_string(w.start + w.length) + ") exceeds the symbol");
}

struct ComplexSampleBlock {
  std::vector<cplx> samples;
  double start_time_s = 0.0;
  std::int64_t symbol_index = 0;
  WindowKind window_kind = WindowKind::begin;

  std::size_t size() const { return samples.size(); }
};

/// Code samples (+-1) covering a window.
inline std::vector<std::int8_t> code_samples(const SpreadingCode& code, const WindowSpec& w,
                                             double sample_rate_hz) {
  check_window(w, sample_rate_hz);
  std::vector<std::int8_t> out(w.length);
  for (std::size_t i = 0; i < w.length; ++i)
    out[i] = static_cast<std::int8_t>(code.sample(w.start + i, sample_rate_hz));
  return out;
}

/// Unit-amplitude local replica for a window; no symbol sign, no noise.
inline ComplexSampleBlock local_replica(const SpreadingCode& code, const WindowSpec& w,
                                        double sample_rate_hz) {
  ComplexSampleBlock block;
  block.window_kind = w.kind;
  block.start_time_s = static_cast<double>(w.start) / sample_rate_hz;
  const auto chips = code_samples(code, w, sample_rate_hz);
  block.samples.reserve(chips.size());
  for (auto c : chips) block.samples.emplace_back(static_cast<double>(c), 0.0);
  return block;
}

/// amplitude * gain * symbol * c(n) over the window. Real-signal carrier
/// phase is the receiver's reference, so it is zero here.
inline ComplexSampleBlock synthesize_signal_window(double amplitude, cplx gain, int symbol,
                                                   std::span<const std::int8_t> chips,
                                                   const WindowSpec& w, double sample_rate_hz) {
  ComplexSampleBlock block;
  block.window_kind = w.kind;
  block.start_time_s = static_cast<double>(w.start) / sample_rate_hz;
  const cplx scale = amplitude * gain * static_cast<double>(symbol);
  block.samples.reserve(chips.size());
  for (auto c : chips) block.samples.push_back(scale * static_cast<double>(c));
  return block;
}

}  // namespace scer
