#pragma once

// Monte Carlo engine: detection probability against the number of
// unpredictable symbols, and the symbol count that reaches a target Pd.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scer/calibration.hpp"
#include "scer/parallel.hpp"
#include "scer/scenario.hpp"
#include "scer/simulator.hpp"

namespace scer {

struct TrialResult {
  Hypothesis hypothesis = Hypothesis::h0;
  DetectorStatistics stats;
  std::array<bool, kDetectorCount> detected{};
  std::uint64_t trial_index = 0;
  double delta_phi = 0.0;
};

/// One end-to-end trial with the scenario's N_b.
inline TrialResult run_trial(const ScenarioConfig& config, Hypothesis hypothesis, std::uint64_t trial_index,
                             const ThresholdSet* thresholds = nullptr) {
  const Scenario sc(config);
  TrialSimulator sim(sc, hypothesis, TrialPurpose::detection, trial_index);
  CorrelationSums sums;
  for (std::int64_t k = 0; k < config.n_symbols; ++k) sums.add(sim.next());
  TrialResult r;
  r.hypothesis = hypothesis;
  r.stats = statistics_from_sums(sums, config.window_begin_s, config.window_end_s);
  r.trial_index = trial_index;
  r.delta_phi = sim.delta_phi();
  if (thresholds) {
    if (thresholds->fingerprint != sc.fingerprint)
      throw std::invalid_argument("run_trial: threshold fingerprint does not match the scenario");
    for (auto d : kAllDetectors)
      r.detected[static_cast<std::size_t>(d)] = thresholds->detects(d, r.stats[d]);
  }
  return r;
}

struct CampaignOptions {
  std::size_t trials = 2000;
  std::size_t calibration_trials = 10000;
  double pfa = 0.02;
  unsigned threads = 1;
  std::int64_t max_n_b = 1000;
  std::int64_t grid_resolution = 10;
  std::int64_t initial_horizon = 160;
};

using PdEstimate = RateEstimate;

/// The detection arm runs with the spoofer present; a scenario without one
/// (attack.kind = none) runs it spoofer-free, so its "Pd" is a false-alarm rate.
inline Hypothesis detection_hypothesis(const ScenarioConfig& c) {
  return c.attack.kind == AttackKind::none ? Hypothesis::h0 : Hypothesis::h1;
}

/// Detection counts at every checkpoint; thresholds[i] belongs to
/// checkpoints[i]. result[checkpoint][detector].
inline std::vector<std::array<PdEstimate, kDetectorCount>> detection_rates(
    const Scenario& sc, std::span<const std::int64_t> checkpoints, std::span<const ThresholdSet* const> thresholds,
    std::size_t trials, unsigned threads) {
  if (checkpoints.size() != thresholds.size())
    throw std::invalid_argument("detection_rates: one threshold set per checkpoint required");
  const std::size_t nc = checkpoints.size();
  std::vector<std::uint8_t> bits(trials * nc, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    const auto stats = simulate_trial(sc, detection_hypothesis(sc.config), TrialPurpose::detection, t, checkpoints);
    for (std::size_t c = 0; c < nc; ++c) {
      std::uint8_t mask = 0;
      for (auto d : kAllDetectors)
        if (thresholds[c]->detects(d, stats[c][d])) mask |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(d));
      bits[t * nc + c] = mask;
    }
  });
  std::vector<std::array<PdEstimate, kDetectorCount>> out(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    for (auto d : kAllDetectors) {
      std::size_t hits = 0;
      for (std::size_t t = 0; t < trials; ++t)
        if (bits[t * nc + c] & (1u << static_cast<unsigned>(d))) ++hits;
      out[c][static_cast<std::size_t>(d)] = rate_estimate(hits, trials);
    }
  }
  return out;
}

/// Pd per detector at the scenario's N_b.
inline std::array<PdEstimate, kDetectorCount> estimate_pd(const ScenarioConfig& config,
                                                          const ThresholdSet& thresholds,
                                                          const CampaignOptions& opt = {}) {
  const Scenario sc(config);
  if (thresholds.fingerprint != sc.fingerprint)
    throw std::invalid_argument("estimate_pd: thresholds were calibrated for fingerprint " +
                                fingerprint_hex(thresholds.fingerprint) + ", scenario is " +
                                fingerprint_hex(sc.fingerprint));
  const std::int64_t nb = config.n_symbols;
  const ThresholdSet* t = &thresholds;
  return detection_rates(sc, std::span<const std::int64_t>(&nb, 1), std::span<const ThresholdSet* const>(&t, 1),
                         opt.trials, opt.threads)
      .front();
}

struct PdCurve {
  std::uint64_t fingerprint = 0;  // of the configured scenario
  std::vector<std::int64_t> n_b;
  std::vector<std::array<PdEstimate, kDetectorCount>> pd;
  std::size_t trials_per_point = 0;
};

inline void check_grid(std::span<const std::int64_t> grid) {
  if (grid.empty()) throw std::invalid_argument("N_b grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] < 1 || (i > 0 && grid[i] <= grid[i - 1]))
      throw std::invalid_argument("N_b grid must be positive and strictly increasing");
}

/// Pd at every grid point with per-N_b thresholds. When `thresholds` is
/// null the grid is calibrated first; otherwise every grid point must have
/// a matching set.
inline PdCurve pd_curve(const ScenarioConfig& config, std::span<const std::int64_t> grid,
                        const CampaignOptions& opt = {}, const ThresholdTable* thresholds = nullptr) {
  check_grid(grid);
  ThresholdTable local;
  if (!thresholds) {
    local = calibrate(config, grid, {opt.pfa, opt.calibration_trials, opt.threads, 50});
    thresholds = &local;
  }
  std::vector<const ThresholdSet*> per_point;
  for (auto nb : grid) per_point.push_back(&thresholds->for_config(with_n_symbols(config, nb)));
  const Scenario sc(with_n_symbols(config, grid.back()));
  PdCurve curve;
  curve.fingerprint = fingerprint(config);
  curve.n_b.assign(grid.begin(), grid.end());
  curve.pd = detection_rates(sc, grid, per_point, opt.trials, opt.threads);
  curve.trials_per_point = opt.trials;
  return curve;
}

struct SearchStep {
  std::int64_t n_b = 0;
  double pd = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct RequiredSymbols {
  Detector detector = Detector::r3;
  double target_pd = 0.9;
  /// Smallest grid N_b whose Pd lower confidence bound reaches the target.
  std::optional<std::int64_t> n_b;
  /// Where the Pd point estimate crosses the target, linearly interpolated.
  std::optional<double> crossing_estimate;
  std::int64_t grid_resolution = 10;
  std::vector<std::int64_t> horizons;
  std::vector<SearchStep> trace;
  /// The search stops at the first qualifying grid point, assuming Pd is
  /// non-decreasing in N_b.
  bool assumes_monotone = true;

  bool reached() const { return n_b.has_value(); }
};

/// Scans N_b on a grid of step `grid_resolution` over an expanding horizon
/// (initial_horizon, doubled up to max_n_b). Trials are prefix-consistent,
/// so each pass re-evaluates the same trials over a longer range.
inline RequiredSymbols required_symbols(const ScenarioConfig& config, Detector detector, double target_pd = 0.9,
                                        const CampaignOptions& opt = {}) {
  if (!(target_pd > 0.0 && target_pd < 1.0)) throw std::invalid_argument("required_symbols: target_pd must lie in (0, 1)");
  if (opt.grid_resolution < 1 || opt.max_n_b < opt.grid_resolution)
    throw std::invalid_argument("required_symbols: bad grid resolution or cap");
  RequiredSymbols out;
  out.detector = detector;
  out.target_pd = target_pd;
  out.grid_resolution = opt.grid_resolution;
  const auto di = static_cast<std::size_t>(detector);

  std::int64_t horizon = std::min(std::max(opt.initial_horizon, opt.grid_resolution), opt.max_n_b);
  std::int64_t evaluated_up_to = 0;
  while (true) {
    out.horizons.push_back(horizon);
    std::vector<std::int64_t> grid;
    for (std::int64_t nb = opt.grid_resolution; nb <= horizon; nb += opt.grid_resolution) grid.push_back(nb);
    const auto curve = pd_curve(config, grid, opt);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] <= evaluated_up_to) continue;
      const auto& e = curve.pd[i][di];
      out.trace.push_back({grid[i], e.rate, e.ci.low, e.ci.high});
    }
    evaluated_up_to = grid.back();

    for (std::size_t i = 0; i < out.trace.size(); ++i) {
      const auto& s = out.trace[i];
      if (!out.crossing_estimate && s.pd >= target_pd) {
        if (i == 0) {
          out.crossing_estimate = static_cast<double>(s.n_b);
        } else {
          const auto& p = out.trace[i - 1];
          const double f = (target_pd - p.pd) / (s.pd - p.pd);
          out.crossing_estimate = static_cast<double>(p.n_b) + f * static_cast<double>(s.n_b - p.n_b);
        }
      }
      if (!out.n_b && s.ci_low >= target_pd) out.n_b = s.n_b;
    }
    if (out.n_b || horizon >= opt.max_n_b) break;
    horizon = std::min(horizon * 2, opt.max_n_b);
  }
  return out;
}

}  // namespace scer
