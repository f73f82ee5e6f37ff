#pragma once

// Propagation effects on the authentic path: AWGN and a two-state
// land-mobile-satellite (Loo-type) fading gain.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "scer/random.hpp"
#include "scer/waveform.hpp"

namespace scer {

inline constexpr double kSpeedOfLight = 2.99792458e8;
inline constexpr double kGalileoE1Hz = 1.57542e9;

/// c / (v f_c). A static receiver has infinite coherence.
inline double coherence_time(double speed_mps, double carrier_hz = kGalileoE1Hz) {
  if (speed_mps < 0.0 || !(carrier_hz > 0.0))
    throw std::invalid_argument("coherence_time: speed must be >= 0 and carrier > 0");
  if (speed_mps == 0.0) return std::numeric_limits<double>::infinity();
  return kSpeedOfLight / (speed_mps * carrier_hz);
}

/// Adds circular complex Gaussian noise of variance sigma2 per sample
/// (sigma2 / 2 per component). `bypass` returns the block unchanged.
inline ComplexSampleBlock add_awgn(ComplexSampleBlock block, double sigma2, RandomStream& rng,
                                   bool bypass = false) {
  if (bypass) return block;
  if (!(sigma2 > 0.0)) throw std::invalid_argument("add_awgn: sigma2 must be positive");
  const double sd = std::sqrt(sigma2 / 2.0);
  for (auto& s : block.samples) {
    const double re = rng.normal();
    const double im = rng.normal();
    s += cplx(sd * re, sd * im);
  }
  return block;
}

enum class ChannelKind { awgn, lms };
enum class LmsState { good, bad };

struct LmsStateParams {
  double direct_mean_db = 0.0;    // mean power of the shadowed direct ray
  double shadow_std_db = 1.0;     // log-normal shadowing spread
  double multipath_power_db = -18.0;  // diffuse (Rayleigh) power
  double mean_dwell_s = 3.0;
};

/// Default two-state parameters. These are a plausible L-band suburban
/// approximation, not fitted data.
struct LmsParams {
  LmsStateParams good{0.0, 1.0, -18.0, 3.0};
  LmsStateParams bad{-12.0, 3.0, -20.0, 1.0};
  double receiver_speed_mps = 100.0 / 3.6;
  double carrier_freq_hz = kGalileoE1Hz;
  double shadow_corr_distance_m = 5.0;
};

inline void validate(const LmsParams& p) {
  if (!(p.good.mean_dwell_s > 0.0) || !(p.bad.mean_dwell_s > 0.0))
    throw std::invalid_argument("lms: dwell times must be positive");
  if (p.receiver_speed_mps < 0.0) throw std::invalid_argument("lms: speed must be >= 0");
  if (p.good.shadow_std_db < 0.0 || p.bad.shadow_std_db < 0.0)
    throw std::invalid_argument("lms: shadowing std must be >= 0");
  if (!(p.carrier_freq_hz > 0.0) || !(p.shadow_corr_distance_m > 0.0))
    throw std::invalid_argument("lms: carrier and shadow correlation distance must be positive");
}

struct ChannelModel {
  ChannelKind kind = ChannelKind::awgn;
  bool noise_enabled = true;
  /// Per-sample complex noise variance; unset means the sample rate (N0 = 1).
  std::optional<double> noise_variance;
  LmsParams lms;
};

/// Semi-Markov good/bad process with exponential dwell times. Within a
/// state the gain is a log-normal shadowed direct ray plus a Rayleigh
/// diffuse term; both evolve as first-order Gauss-Markov processes, the
/// diffuse one with time constant equal to the coherence time. A static
/// receiver freezes the whole process.
class LmsProcess {
 public:
  LmsProcess(const LmsParams& params, RandomStream rng) : p_(params), rng_(std::move(rng)) {
    validate(p_);
    const double pg = p_.good.mean_dwell_s / (p_.good.mean_dwell_s + p_.bad.mean_dwell_s);
    state_ = rng_.uniform() < pg ? LmsState::good : LmsState::bad;
    remaining_ = rng_.exponential(state_params().mean_dwell_s);
    shadow_z_ = rng_.normal();
    diffuse_ = cplx(rng_.normal(), rng_.normal()) / std::sqrt(2.0);
    coherence_ = coherence_time(p_.receiver_speed_mps, p_.carrier_freq_hz);
  }

  LmsState state() const { return state_; }

  cplx gain() const {
    const auto& s = state_params();
    const double direct_db = s.direct_mean_db + s.shadow_std_db * shadow_z_;
    const double direct = std::pow(10.0, direct_db / 20.0);
    return direct + std::sqrt(std::pow(10.0, s.multipath_power_db / 10.0)) * diffuse_;
  }

  /// Moves the process forward by dt seconds and returns the new gain.
  cplx advance(double dt) {
    if (dt < 0.0) throw std::invalid_argument("LmsProcess::advance: negative dt");
    const double n_shadow = rng_.normal();
    const double n_re = rng_.normal();
    const double n_im = rng_.normal();
    if (p_.receiver_speed_mps == 0.0 || dt == 0.0) return gain();

    remaining_ -= dt;
    while (remaining_ <= 0.0) {
      state_ = state_ == LmsState::good ? LmsState::bad : LmsState::good;
      remaining_ += rng_.exponential(state_params().mean_dwell_s);
    }
    const double rho_s = std::exp(-p_.receiver_speed_mps * dt / p_.shadow_corr_distance_m);
    shadow_z_ = rho_s * shadow_z_ + std::sqrt(1.0 - rho_s * rho_s) * n_shadow;
    const double rho_d = std::exp(-dt / coherence_);
    diffuse_ = rho_d * diffuse_ + std::sqrt(1.0 - rho_d * rho_d) * cplx(n_re, n_im) / std::sqrt(2.0);
    return gain();
  }

 private:
  const LmsStateParams& state_params() const { return state_ == LmsState::good ? p_.good : p_.bad; }

  LmsParams p_;
  RandomStream rng_;
  LmsState state_ = LmsState::good;
  double remaining_ = 0.0;
  double shadow_z_ = 0.0;
  cplx diffuse_{};
  double coherence_ = 0.0;
};

struct LmsGainSeries {
  std::vector<cplx> begin_gain;
  std::vector<cplx> end_gain;
  std::vector<LmsState> state;
};

/// Gains sampled at the begin- and end-window starts of consecutive
/// symbols. `end_offset_s` is the end-window start within the symbol.
inline LmsGainSeries lms_gain_series(const LmsParams& params, std::size_t n_symbols,
                                     double symbol_spacing_s, double end_offset_s, RandomStream rng) {
  if (n_symbols < 1) throw std::invalid_argument("lms_gain_series: n_symbols must be >= 1");
  if (end_offset_s < 0.0 || end_offset_s > symbol_spacing_s)
    throw std::invalid_argument("lms_gain_series: end offset outside the symbol");
  LmsProcess proc(params, std::move(rng));
  LmsGainSeries out;
  out.begin_gain.reserve(n_symbols);
  out.end_gain.reserve(n_symbols);
  out.state.reserve(n_symbols);
  for (std::size_t k = 0; k < n_symbols; ++k) {
    out.begin_gain.push_back(proc.advance(k == 0 ? 0.0 : symbol_spacing_s - end_offset_s));
    out.state.push_back(proc.state());
    out.end_gain.push_back(proc.advance(end_offset_s));
  }
  return out;
}

}  // namespace scer
