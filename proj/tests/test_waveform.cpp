#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "scer/channel.hpp"
#include "scer/detector.hpp"
#include "scer/scenario.hpp"
#include "scer/waveform.hpp"

namespace scer {
namespace {

TEST(GenerateCode, DeterministicPerSeed) {
  const auto a = generate_code(7, 4092);
  const auto b = generate_code(7, 4092);
  const auto c = generate_code(8, 4092);
  EXPECT_EQ(a.chips, b.chips);
  EXPECT_NE(a.chips, c.chips);
  for (auto chip : a.chips) EXPECT_TRUE(chip == 1 || chip == -1);
}

TEST(GenerateCode, BalancedForLongCodes) {
  const auto code = generate_code(7, 100000);
  double sum = 0.0;
  for (auto chip : code.chips) sum += chip;
  EXPECT_LT(std::abs(sum / 100000.0), 0.02);
  EXPECT_THROW(generate_code(7, 0), std::invalid_argument);
}

TEST(GenerateCode, BocSampleStructure) {
  // Four samples per chip at 4.092 MHz, subcarrier sign flips every two.
  const auto code = generate_code(3);
  for (std::size_t chip = 0; chip < 20; ++chip) {
    const int c = code.chips[chip];
    EXPECT_EQ(code.sample(4 * chip + 0, kDefaultSampleRate), c);
    EXPECT_EQ(code.sample(4 * chip + 1, kDefaultSampleRate), c);
    EXPECT_EQ(code.sample(4 * chip + 2, kDefaultSampleRate), -c);
    EXPECT_EQ(code.sample(4 * chip + 3, kDefaultSampleRate), -c);
  }
}

TEST(Amplitude, FromCn0) {
  EXPECT_DOUBLE_EQ(amplitude_from_cn0(0.0), 1.0);
  EXPECT_NEAR(amplitude_from_cn0(40.0), 100.0, 1e-12);
  EXPECT_NEAR(amplitude_from_cn0(45.0), 177.82794100389228, 1e-10);
  EXPECT_THROW(amplitude_from_cn0(std::nan("")), std::invalid_argument);
}

TEST(Windows, SampleCountsAndPlacement) {
  ScenarioConfig c;
  const auto b = begin_window(c);
  const auto e = end_window(c);
  EXPECT_EQ(b.start, 0u);
  EXPECT_EQ(b.length, 1023u);
  EXPECT_EQ(e.length, 1023u);
  EXPECT_EQ(e.start + e.length, symbol_samples(c.sample_rate_hz));
  EXPECT_LE(b.start + b.length, e.start);  // disjoint
  EXPECT_THROW(check_window({WindowKind::end, 16000, 1000}, c.sample_rate_hz), std::out_of_range);
}

TEST(LocalReplica, UnitModulusAndSelfCorrelation) {
  ScenarioConfig c;
  const auto code = generate_code(11);
  const auto rep = local_replica(code, begin_window(c), c.sample_rate_hz);
  for (auto s : rep.samples) {
    EXPECT_EQ(std::abs(s), 1.0);
    EXPECT_TRUE(s.real() == 1.0 || s.real() == -1.0);
  }
  const auto r = partial_correlation(rep, rep);
  EXPECT_EQ(r, cplx(static_cast<double>(rep.size()), 0.0));
}

TEST(SynthesizeRealWindow, UnitAndLinearity) {
  ScenarioConfig c;
  c.cn0_detector_real_dbhz = 0.0;  // A = 1
  const auto code = generate_code(5);
  const auto w = begin_window(c);
  const auto rep = local_replica(code, w, c.sample_rate_hz);
  const auto plus = synthesize_real_window(c, code, +1, w, 1.0);
  const auto minus = synthesize_real_window(c, code, -1, w, 1.0);
  ASSERT_EQ(plus.size(), rep.size());
  for (std::size_t n = 0; n < plus.size(); ++n) {
    EXPECT_EQ(plus.samples[n], rep.samples[n]);
    EXPECT_EQ(minus.samples[n], -plus.samples[n]);
  }
  EXPECT_THROW(synthesize_real_window(c, code, 0, w, 1.0), std::invalid_argument);
}

TEST(SynthesizeRealWindow, AmplitudeAndGainPhase) {
  ScenarioConfig c;
  c.cn0_detector_real_dbhz = 40.0;
  const auto code = generate_code(5);
  const auto w = end_window(c);
  const auto rep = local_replica(code, w, c.sample_rate_hz);
  const auto blk = synthesize_real_window(c, code, +1, w, std::polar(1.0, std::numbers::pi / 2));
  for (std::size_t n = 0; n < blk.size(); ++n) {
    EXPECT_NEAR(blk.samples[n].real(), 0.0, 1e-12);
    EXPECT_NEAR(blk.samples[n].imag(), 100.0 * rep.samples[n].real(), 1e-12);
  }
}

TEST(SynthesizeRealWindow, EnergyNormalization) {
  ScenarioConfig c;
  c.cn0_detector_real_dbhz = 37.0;
  const auto code = generate_code(9);
  const auto w = begin_window(c);
  const auto blk = synthesize_real_window(c, code, +1, w, 1.0);
  const auto r = partial_correlation(blk, local_replica(code, w, c.sample_rate_hz));
  EXPECT_NEAR(r.real(), amplitude_from_cn0(37.0) * static_cast<double>(w.length), 1e-8);
  EXPECT_NEAR(r.imag(), 0.0, 1e-12);
}

TEST(SynthesizeRealWindow, Deterministic) {
  ScenarioConfig c;
  const auto a = synthesize_real_window(c, generate_code(1), -1, begin_window(c), {0.3, 0.4});
  const auto b = synthesize_real_window(c, generate_code(1), -1, begin_window(c), {0.3, 0.4});
  EXPECT_EQ(a.samples, b.samples);
}

// With sigma^2 = fs, a coherent sum over T seconds decides the symbol with
// error 0.5 erfc(sqrt(C/N0 T)).
TEST(NoiseConvention, CoherentDecisionErrorMatchesClosedForm) {
  ScenarioConfig c;
  c.window_begin_s = 25e-6;
  c.cn0_detector_real_dbhz = 40.0;
  const auto code = generate_code(2);
  const auto w = begin_window(c);
  const auto rep = local_replica(code, w, c.sample_rate_hz);
  const auto clean = synthesize_real_window(c, code, +1, w, 1.0);
  RandomStream rng(99);
  const int trials = 20000;
  int errors = 0;
  for (int i = 0; i < trials; ++i) {
    const auto noisy = add_awgn(clean, c.sample_rate_hz, rng);
    if (partial_correlation(noisy, rep).real() < 0.0) ++errors;
  }
  const double t = static_cast<double>(w.length) / c.sample_rate_hz;
  const double expected = 0.5 * std::erfc(std::sqrt(1e4 * t));
  const double sd = std::sqrt(expected * (1 - expected) / trials);
  EXPECT_NEAR(static_cast<double>(errors) / trials, expected, 4 * sd);
}

}  // namespace
}  // namespace scer
