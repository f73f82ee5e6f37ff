#pragma once

// Symbol-by-symbol trial generation under H0 or H1.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "scer/attack.hpp"
#include "scer/channel.hpp"
#include "scer/detector.hpp"
#include "scer/random.hpp"
#include "scer/scenario.hpp"

namespace scer {

enum class Hypothesis { h0, h1 };

inline const char* hypothesis_name(Hypothesis h) { return h == Hypothesis::h0 ? "H0" : "H1"; }

/// Statistic values with NaN marking an invalid statistic.
using StatVector = std::array<double, kDetectorCount>;

inline StatVector to_stat_vector(const DetectorStatistics& s) { return s.value; }

/// Generates the sign-stripped correlation pairs of one trial, one
/// unpredictable symbol per call. Every random stream is consumed in a
/// fixed per-symbol pattern, so the first k pairs never depend on how many
/// symbols are drawn afterwards.
class TrialSimulator {
 public:
  TrialSimulator(const Scenario& scenario, Hypothesis hypothesis, TrialPurpose purpose,
                 std::uint64_t trial_index)
      : sc_(scenario),
        hypothesis_(hypothesis),
        symbols_(seed(purpose, trial_index, StreamKind::symbols)),
        spoofer_(seed(purpose, trial_index, StreamKind::spoofer)),
        noise_(seed(purpose, trial_index, StreamKind::noise)),
        attack_(seed(purpose, trial_index, StreamKind::attack)) {
    const auto& c = sc_.config;
    if (hypothesis_ == Hypothesis::h1 && c.attack.kind == AttackKind::none)
      throw std::invalid_argument("H1 trial requested for a scenario without a spoofer (attack.kind = none)");
    RandomStream phase(seed(purpose, trial_index, StreamKind::phase));
    delta_phi_ = 2.0 * std::numbers::pi * phase.uniform();
    spoof_rot_ = std::polar(sc_.amplitude_spoof, delta_phi_);
    if (c.channel.kind == ChannelKind::lms)
      lms_.emplace(c.channel.lms, RandomStream(seed(purpose, trial_index, StreamKind::channel)));
    if (c.synthesis == Synthesis::samples) {
      begin_replica_ = local_replica(sc_.code, sc_.begin, c.sample_rate_hz);
    }
  }

  double delta_phi() const { return delta_phi_; }
  std::int64_t symbols_drawn() const { return k_; }

  PartialCorrelationPair next() {
    const auto& c = sc_.config;
    const double fs = c.sample_rate_hz;
    const std::size_t s_len = symbol_samples(fs);

    const int b = symbols_.sign();
    int b_end = b;
    std::size_t end_start = sc_.end.start;
    {
      // Always drawn so that both policies consume the stream identically.
      const int predictable = symbols_.sign();
      const std::uint64_t offset_bits = symbols_.bits();
      if (c.end_window_policy == EndWindowPolicy::random_predictable_symbol) {
        b_end = predictable;
        end_start = static_cast<std::size_t>(offset_bits % (s_len - sc_.end.length + 1));
      }
    }

    cplx g_beg{1.0, 0.0};
    cplx g_end{1.0, 0.0};
    if (lms_) {
      g_beg = lms_->advance(k_ == 0 ? 0.0 : kSymbolDuration - sc_.end_window_start_s);
      g_end = lms_->advance(sc_.end_window_start_s);
    }

    std::vector<std::int8_t> tx;
    int spoof_end = 0;
    if (hypothesis_ == Hypothesis::h1) {
      const auto trace = spoofer_estimate_stream(b, c.cn0_spoofer_real_dbhz, sc_.begin_chips, fs, spoofer_);
      const int guess = attack_.sign();
      spoof_end = end_window_symbol(c.attack, c.cn0_spoofer_real_dbhz, sc_.end_window_start_s, b, attack_);
      if (c.end_window_policy == EndWindowPolicy::random_predictable_symbol) spoof_end = b_end;
      tx = transmitted_symbols(c.attack.kind, trace, sc_.guess_boundary, guess);
    }

    cplx raw_beg;
    cplx raw_end;
    if (c.synthesis == Synthesis::correlator) {
      const double nb = static_cast<double>(sc_.begin.length);
      const double ne = static_cast<double>(sc_.end.length);
      raw_beg = sc_.amplitude_real * g_beg * static_cast<double>(b) * nb;
      raw_end = sc_.amplitude_real * g_end * static_cast<double>(b_end) * ne;
      if (hypothesis_ == Hypothesis::h1) {
        long sum_tx = 0;
        for (auto v : tx) sum_tx += v;
        raw_beg += spoof_rot_ * static_cast<double>(sum_tx);
        raw_end += spoof_rot_ * static_cast<double>(spoof_end) * ne;
      }
      if (c.channel.noise_enabled) {
        const double sb = std::sqrt(nb * sc_.sigma2 / 2.0);
        const double se = std::sqrt(ne * sc_.sigma2 / 2.0);
        const double n1 = noise_.normal(), n2 = noise_.normal(), n3 = noise_.normal(), n4 = noise_.normal();
        raw_beg += cplx(sb * n1, sb * n2);
        raw_end += cplx(se * n3, se * n4);
      }
    } else {
      const WindowSpec end_w{WindowKind::end, end_start, sc_.end.length};
      const auto end_chips = end_start == sc_.end.start ? sc_.end_chips : code_samples(sc_.code, end_w, fs);
      auto beg_block = synthesize_signal_window(sc_.amplitude_real, g_beg, b, sc_.begin_chips, sc_.begin, fs);
      auto end_block = synthesize_signal_window(sc_.amplitude_real, g_end, b_end, end_chips, end_w, fs);
      if (hypothesis_ == Hypothesis::h1) {
        for (std::size_t n = 0; n < beg_block.samples.size(); ++n)
          beg_block.samples[n] += spoof_rot_ * static_cast<double>(tx[n] * sc_.begin_chips[n]);
        for (std::size_t n = 0; n < end_block.samples.size(); ++n)
          end_block.samples[n] += spoof_rot_ * static_cast<double>(spoof_end * end_chips[n]);
      }
      const bool bypass = !c.channel.noise_enabled;
      beg_block = add_awgn(std::move(beg_block), sc_.sigma2, noise_, bypass);
      end_block = add_awgn(std::move(end_block), sc_.sigma2, noise_, bypass);
      raw_beg = partial_correlation(beg_block, begin_replica_);
      raw_end = correlate_with_chips(end_block.samples, end_chips);
    }

    PartialCorrelationPair pair;
    pair.b_beg = strip_symbol_sign(raw_beg, b);
    pair.b_end = strip_symbol_sign(raw_end, b_end);
    pair.symbol_index = k_++;
    pair.symbol_sign_stripped = true;
    return pair;
  }

 private:
  std::uint64_t seed(TrialPurpose p, std::uint64_t idx, StreamKind k) const {
    return trial_stream_seed(sc_.config.master_seed, p, idx, k);
  }

  static cplx correlate_with_chips(const std::vector<cplx>& block, const std::vector<std::int8_t>& chips) {
    cplx acc{};
    for (std::size_t n = 0; n < block.size(); ++n) acc += block[n] * static_cast<double>(chips[n]);
    return acc;
  }

  const Scenario& sc_;
  Hypothesis hypothesis_;
  RandomStream symbols_;
  RandomStream spoofer_;
  RandomStream noise_;
  RandomStream attack_;
  std::optional<LmsProcess> lms_;
  double delta_phi_ = 0.0;
  cplx spoof_rot_{};
  ComplexSampleBlock begin_replica_;
  std::int64_t k_ = 0;
};

/// Statistics after each of the (ascending) symbol counts in `checkpoints`.
inline std::vector<DetectorStatistics> simulate_trial(const Scenario& sc, Hypothesis h, TrialPurpose purpose,
                                                      std::uint64_t trial_index,
                                                      std::span<const std::int64_t> checkpoints) {
  if (checkpoints.empty()) throw std::invalid_argument("simulate_trial: no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i)
    if (checkpoints[i] < 1 || (i > 0 && checkpoints[i] <= checkpoints[i - 1]))
      throw std::invalid_argument("simulate_trial: checkpoints must be positive and strictly increasing");
  TrialSimulator sim(sc, h, purpose, trial_index);
  CorrelationSums sums;
  std::vector<DetectorStatistics> out;
  out.reserve(checkpoints.size());
  for (auto cp : checkpoints) {
    while (static_cast<std::int64_t>(sums.count) < cp) sums.add(sim.next());
    out.push_back(statistics_from_sums(sums, sc.config.window_begin_s, sc.config.window_end_s));
  }
  return out;
}

/// All sign-stripped pairs of one trial with the scenario's N_b.
inline std::vector<PartialCorrelationPair> simulate_pairs(const Scenario& sc, Hypothesis h, TrialPurpose purpose,
                                                          std::uint64_t trial_index) {
  TrialSimulator sim(sc, h, purpose, trial_index);
  std::vector<PartialCorrelationPair> out;
  out.reserve(static_cast<std::size_t>(sc.config.n_symbols));
  for (std::int64_t k = 0; k < sc.config.n_symbols; ++k) out.push_back(sim.next());
  return out;
}

}  // namespace scer
