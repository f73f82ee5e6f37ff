#pragma once

// Detection thresholds from H0 simulations, plus the closed-form Rayleigh
// threshold for R3.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scer/parallel.hpp"
#include "scer/scenario.hpp"
#include "scer/simulator.hpp"
#include "scer/stats.hpp"

namespace scer {

/// Upper empirical quantile: the ceil((1 - pfa) M)-th order statistic.
/// A statistic strictly above it declares spoofing, so at most
/// floor(pfa M) calibration values exceed it. Requires M >= min_exceedances / pfa.
inline double empirical_threshold(std::span<const double> h0_values, double pfa,
                                  std::size_t min_exceedances = 50) {
  if (!(pfa > 0.0 && pfa < 1.0)) throw std::invalid_argument("empirical_threshold: pfa must lie in (0, 1)");
  const std::size_t m = h0_values.size();
  const double needed = std::ceil(static_cast<double>(min_exceedances) / pfa - 1e-9);
  if (m == 0 || static_cast<double>(m) < needed)
    throw std::invalid_argument("empirical_threshold: " + std::to_string(m) + " H0 samples given, at least " +
                                std::to_string(static_cast<long long>(std::max(needed, 1.0))) +
                                " required for pfa " + std::to_string(pfa));
  std::vector<double> sorted(h0_values.begin(), h0_values.end());
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - pfa) * static_cast<double>(m) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, m);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
  return sorted[rank - 1];
}

/// Per-component standard deviation of mean(B_beg - B_end) under H0 for
/// independent equal-length windows of N samples.
inline double rayleigh_scale_r3(double noise_sigma2, std::size_t window_samples, std::size_t n_symbols) {
  if (!(noise_sigma2 > 0.0) || window_samples == 0 || n_symbols == 0)
    throw std::invalid_argument("rayleigh_scale_r3: inputs must be positive");
  return std::sqrt(static_cast<double>(window_samples) * noise_sigma2 / static_cast<double>(n_symbols));
}

/// Inverse Rayleigh cdf at 1 - pfa.
inline double rayleigh_threshold(double scale, double pfa) {
  if (!(scale > 0.0)) throw std::invalid_argument("rayleigh_threshold: scale must be positive");
  if (!(pfa > 0.0 && pfa < 1.0)) throw std::invalid_argument("rayleigh_threshold: pfa must lie in (0, 1)");
  return scale * std::sqrt(2.0 * std::log(1.0 / pfa));
}

enum class ThresholdMethod { empirical, rayleigh };

inline const char* method_name(ThresholdMethod m) {
  return m == ThresholdMethod::empirical ? "empirical" : "rayleigh";
}

struct ThresholdSet {
  double target_pfa = 0.02;
  ThresholdMethod method = ThresholdMethod::empirical;
  std::array<double, kDetectorCount> gamma{};
  std::array<bool, kDetectorCount> valid{};
  std::int64_t h0_trials = 0;
  std::int64_t n_b = 0;
  std::uint64_t fingerprint = 0;
  /// Closed-form R3 threshold, kept for comparison (AWGN, equal windows).
  std::optional<double> rayleigh_r3;

  double operator[](Detector d) const { return gamma[static_cast<std::size_t>(d)]; }

  /// statistic > gamma, for valid statistic and threshold.
  bool detects(Detector d, double statistic) const {
    const auto i = static_cast<std::size_t>(d);
    return valid[i] && !std::isnan(statistic) && statistic > gamma[i];
  }

  /// Every valid detector fires on any positive statistic (gamma = 0) or
  /// never fires (gamma = +inf).
  static ThresholdSet constant(double g, std::uint64_t fp, std::int64_t n_b) {
    ThresholdSet t;
    t.gamma.fill(g);
    t.valid.fill(true);
    t.fingerprint = fp;
    t.n_b = n_b;
    return t;
  }
};

struct ThresholdTable {
  std::vector<ThresholdSet> sets;

  const ThresholdSet* find(std::uint64_t fp) const {
    for (const auto& s : sets)
      if (s.fingerprint == fp) return &s;
    return nullptr;
  }

  /// Set calibrated for this exact scenario; a missing entry is an error.
  const ThresholdSet& for_config(const ScenarioConfig& c) const {
    const auto fp = fingerprint(c);
    if (const auto* s = find(fp)) return *s;
    throw std::invalid_argument("no threshold set matches scenario fingerprint " + fingerprint_hex(fp) +
                                " (n_b = " + std::to_string(c.n_symbols) + ")");
  }
};

struct CalibrationOptions {
  double pfa = 0.02;
  std::size_t trials = 10000;
  unsigned threads = 1;
  std::size_t min_exceedances = 50;
};

inline ScenarioConfig with_n_symbols(ScenarioConfig c, std::int64_t n_b) {
  c.n_symbols = n_b;
  return c;
}

/// H0 statistics of `trials` trials, evaluated at every checkpoint in one
/// pass; result[checkpoint][trial].
inline std::vector<std::vector<StatVector>> h0_statistics(const Scenario& sc, TrialPurpose purpose,
                                                         std::size_t trials,
                                                         std::span<const std::int64_t> checkpoints,
                                                         unsigned threads) {
  std::vector<std::vector<StatVector>> by_trial(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto stats = simulate_trial(sc, Hypothesis::h0, purpose, t, checkpoints);
    auto& row = by_trial[t];
    row.reserve(stats.size());
    for (const auto& s : stats) row.push_back(to_stat_vector(s));
  });
  std::vector<std::vector<StatVector>> out(checkpoints.size(), std::vector<StatVector>(trials));
  for (std::size_t t = 0; t < trials; ++t)
    for (std::size_t c = 0; c < checkpoints.size(); ++c) out[c][t] = by_trial[t][c];
  return out;
}

inline ThresholdSet thresholds_from_h0(const std::vector<StatVector>& h0, const ScenarioConfig& config,
                                       const CalibrationOptions& opt) {
  ThresholdSet set;
  set.target_pfa = opt.pfa;
  set.h0_trials = static_cast<std::int64_t>(h0.size());
  set.n_b = config.n_symbols;
  set.fingerprint = fingerprint(config);
  std::vector<double> column;
  column.reserve(h0.size());
  for (auto d : kAllDetectors) {
    const auto i = static_cast<std::size_t>(d);
    column.clear();
    for (const auto& row : h0)
      if (!std::isnan(row[i])) column.push_back(row[i]);
    try {
      set.gamma[i] = empirical_threshold(column, opt.pfa, opt.min_exceedances);
      set.valid[i] = true;
    } catch (const std::invalid_argument&) {
      set.gamma[i] = std::numeric_limits<double>::quiet_NaN();
      set.valid[i] = false;
    }
  }
  if (config.channel.kind == ChannelKind::awgn && config.window_begin_s == config.window_end_s &&
      config.channel.noise_enabled) {
    set.rayleigh_r3 = rayleigh_threshold(
        rayleigh_scale_r3(config.noise_variance(), window_samples(config.window_begin_s, config.sample_rate_hz),
                          static_cast<std::size_t>(config.n_symbols)),
        opt.pfa);
  }
  return set;
}

inline void check_pfa(double pfa) {
  if (!(pfa > 0.0 && pfa < 1.0)) throw std::invalid_argument("pfa must lie in (0, 1), got " + std::to_string(pfa));
}

/// Empirical thresholds at every N_b in `n_b_grid` (strictly increasing),
/// from one set of H0 trials.
inline ThresholdTable calibrate(const ScenarioConfig& config, std::span<const std::int64_t> n_b_grid,
                                const CalibrationOptions& opt = {}) {
  check_pfa(opt.pfa);
  const Scenario sc(with_n_symbols(config, n_b_grid.empty() ? config.n_symbols : n_b_grid.back()));
  const auto h0 = h0_statistics(sc, TrialPurpose::calibration, opt.trials, n_b_grid, opt.threads);
  ThresholdTable table;
  for (std::size_t c = 0; c < n_b_grid.size(); ++c)
    table.sets.push_back(thresholds_from_h0(h0[c], with_n_symbols(config, n_b_grid[c]), opt));
  return table;
}

inline ThresholdSet calibrate(const ScenarioConfig& config, const CalibrationOptions& opt = {}) {
  const std::int64_t nb = config.n_symbols;
  return calibrate(config, std::span<const std::int64_t>(&nb, 1), opt).sets.front();
}

struct RateEstimate {
  std::size_t hits = 0;
  std::size_t trials = 0;
  double rate = 0.0;
  Interval ci;
};

inline RateEstimate rate_estimate(std::size_t hits, std::size_t trials) {
  RateEstimate r;
  r.hits = hits;
  r.trials = trials;
  r.rate = trials == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(trials);
  r.ci = wilson_interval(hits, trials);
  return r;
}

/// False-alarm rate of `thresholds` on fresh H0 trials (a stream disjoint
/// from calibration).
inline std::array<RateEstimate, kDetectorCount> verify_pfa(const ThresholdSet& thresholds,
                                                           const ScenarioConfig& config, std::size_t trials,
                                                           unsigned threads = 1) {
  if (trials < 1000) throw std::invalid_argument("verify_pfa: at least 1000 trials required");
  if (thresholds.fingerprint != fingerprint(config))
    throw std::invalid_argument("verify_pfa: threshold fingerprint does not match the scenario");
  const Scenario sc(config);
  const std::int64_t nb = config.n_symbols;
  const auto h0 = h0_statistics(sc, TrialPurpose::verification, trials, std::span<const std::int64_t>(&nb, 1),
                                threads);
  std::array<RateEstimate, kDetectorCount> out;
  for (auto d : kAllDetectors) {
    std::size_t hits = 0;
    for (const auto& row : h0[0])
      if (thresholds.detects(d, row[static_cast<std::size_t>(d)])) ++hits;
    out[static_cast<std::size_t>(d)] = rate_estimate(hits, trials);
  }
  return out;
}

}  // namespace scer
