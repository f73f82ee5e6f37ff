#pragma once

// Zero-delay SCER spoofer: per-sample symbol estimation over the begin
// window and the three replay strategies built on it.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "scer/analysis.hpp"
#include "scer/random.hpp"
#include "scer/waveform.hpp"

namespace scer {

enum class AttackKind { none, estimated_value, random_value, zero_value };

struct AttackModel {
  AttackKind kind = AttackKind::estimated_value;
  /// Length of the blind segment for random_value / zero_value. Unset means
  /// the time needed to reach a 10% decision error at the spoofer's C/N0.
  std::optional<double> guess_duration_s;
};

inline constexpr double kDefaultGuessErrorProb = 0.1;

inline double resolved_guess_duration(const AttackModel& attack, double cn0_spoofer_real_dbhz) {
  if (attack.guess_duration_s) return *attack.guess_duration_s;
  return spoofer_decision_time(cn0_spoofer_real_dbhz, kDefaultGuessErrorProb);
}

struct SpooferDecisionTrace {
  /// decisions[m-1] is the hard decision after accumulating samples 1..m.
  std::vector<std::int8_t> decisions;
  int end_decision = 1;
  std::uint64_t noise_seed = 0;
};

/// Running sign of Re{sum y_s(n) x(n)} where y_s(n) = A_s b c(n) + w(n).
/// Only the real part of the noise reaches the decision, so the caller
/// supplies that component. sign(0) is +1.
inline std::vector<std::int8_t> spoofer_decisions(int true_symbol, double spoofer_amplitude,
                                                  std::span<const std::int8_t> chips,
                                                  std::span<const double> noise_re) {
  if (noise_re.size() != chips.size())
    throw std::invalid_argument("spoofer_decisions: noise and code length differ");
  std::vector<std::int8_t> out(chips.size());
  const double s = spoofer_amplitude * true_symbol;
  double acc = 0.0;
  for (std::size_t n = 0; n < chips.size(); ++n) {
    const double c = chips[n];
    acc += (s * c + noise_re[n]) * c;
    out[n] = acc >= 0.0 ? 1 : -1;
  }
  return out;
}

/// Simulates the spoofer's own reception of the authentic signal (perfect
/// code and carrier wipe-off, independent noise) and returns its decision
/// after every sample. An infinite C/N0 gives a noiseless trace.
inline SpooferDecisionTrace spoofer_estimate_stream(int true_symbol, double cn0_spoofer_real_dbhz,
                                                    std::span<const std::int8_t> chips,
                                                    double sample_rate_hz, RandomStream& rng) {
  if (chips.empty()) throw std::invalid_argument("spoofer_estimate_stream: empty window");
  SpooferDecisionTrace trace;
  trace.decisions.resize(chips.size());
  if (cn0_spoofer_real_dbhz == std::numeric_limits<double>::infinity()) {
    for (auto& d : trace.decisions) d = static_cast<std::int8_t>(true_symbol);
    trace.end_decision = true_symbol;
    return trace;
  }
  const double s = amplitude_from_cn0(cn0_spoofer_real_dbhz) * true_symbol;
  const double sigma_re = std::sqrt(sample_rate_hz / 2.0);
  double acc = 0.0;
  for (std::size_t n = 0; n < chips.size(); ++n) {
    const double c = chips[n];
    acc += (s * c + sigma_re * rng.normal()) * c;
    trace.decisions[n] = acc >= 0.0 ? 1 : -1;
  }
  trace.end_decision = trace.decisions.back();
  return trace;
}

/// Number of begin-window samples during which random_value / zero_value
/// transmit the blind segment.
inline std::size_t guess_samples(double guess_duration_s, double sample_rate_hz) {
  return static_cast<std::size_t>(std::max<long long>(1, std::llround(guess_duration_s * sample_rate_hz)));
}

/// Symbol value the spoofer puts on air at every begin-window sample.
/// random_value sends `guess_symbol` (drawn once per symbol) and zero_value
/// sends nothing before the guess boundary; afterwards both hold the
/// decision reached at the boundary.
inline std::vector<std::int8_t> transmitted_symbols(AttackKind kind, const SpooferDecisionTrace& trace,
                                                    std::size_t guess_boundary, int guess_symbol) {
  const std::size_t n = trace.decisions.size();
  std::vector<std::int8_t> out(n);
  switch (kind) {
    case AttackKind::none:
      throw std::invalid_argument("no spoofed component exists without an attack");
    case AttackKind::estimated_value:
      return trace.decisions;
    case AttackKind::random_value:
    case AttackKind::zero_value: {
      const std::int8_t blind = kind == AttackKind::random_value ? static_cast<std::int8_t>(guess_symbol) : 0;
      const std::size_t boundary = std::min(guess_boundary, n);
      const std::int8_t after = guess_boundary <= n && guess_boundary >= 1
                                    ? trace.decisions[guess_boundary - 1]
                                    : std::int8_t{0};
      for (std::size_t i = 0; i < boundary; ++i) out[i] = blind;
      for (std::size_t i = boundary; i < n; ++i) out[i] = after;
      return out;
    }
  }
  return out;
}

/// beta * btilde(n) * c(n) * exp(j dphi) over the begin window.
inline ComplexSampleBlock spoofed_begin_window(const AttackModel& attack, const SpooferDecisionTrace& trace,
                                               double beta, double delta_phi,
                                               std::span<const std::int8_t> chips, const WindowSpec& window,
                                               double sample_rate_hz, std::size_t guess_boundary,
                                               int guess_symbol) {
  if (trace.decisions.size() < chips.size())
    throw std::invalid_argument("spoofed_begin_window: trace shorter than the window");
  const auto tx = transmitted_symbols(attack.kind, trace, guess_boundary, guess_symbol);
  const cplx rot = std::polar(beta, delta_phi);
  ComplexSampleBlock block;
  block.window_kind = window.kind;
  block.start_time_s = static_cast<double>(window.start) / sample_rate_hz;
  block.samples.resize(chips.size());
  for (std::size_t n = 0; n < chips.size(); ++n)
    block.samples[n] = rot * static_cast<double>(tx[n] * chips[n]);
  return block;
}

/// Spoofer's symbol for the end window, drawn from the closed-form error
/// probability after integrating up to the end-window start. Always
/// consumes one uniform so the stream layout does not depend on C/N0.
inline int end_window_symbol(const AttackModel& attack, double cn0_spoofer_real_dbhz,
                             double end_window_start_s, int true_symbol, RandomStream& rng) {
  if (attack.kind == AttackKind::none)
    throw std::invalid_argument("end_window_symbol: no spoofer under H0");
  if (!(end_window_start_s > 0.0 && end_window_start_s < kSymbolDuration))
    throw std::invalid_argument("end_window_symbol: start must lie inside the symbol");
  const double pe = symbol_error_prob(cn0_spoofer_real_dbhz, end_window_start_s);
  return rng.uniform() < pe ? -true_symbol : true_symbol;
}

}  // namespace scer
