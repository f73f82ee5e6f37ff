#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "scer/attack.hpp"
#include "scer/scenario.hpp"

namespace scer {
namespace {

std::vector<std::int8_t> chips_for(std::size_t n, std::uint64_t seed = 4) {
  ScenarioConfig c;
  const auto code = generate_code(seed);
  return code_samples(code, {WindowKind::begin, 0, n}, c.sample_rate_hz);
}

TEST(SpooferDecisions, NoiselessTraceIsCorrectEverywhere) {
  const auto chips = chips_for(500);
  const std::vector<double> zero(500, 0.0);
  for (int b : {-1, 1}) {
    const auto d = spoofer_decisions(b, 100.0, chips, zero);
    for (auto v : d) EXPECT_EQ(v, b);
  }
  RandomStream rng(1);
  const auto tr = spoofer_estimate_stream(-1, std::numeric_limits<double>::infinity(), chips, 4.092e6, rng);
  for (auto v : tr.decisions) EXPECT_EQ(v, -1);
  EXPECT_EQ(tr.end_decision, -1);
}

TEST(SpooferDecisions, SignOfZeroIsPlus) {
  const std::vector<std::int8_t> chips{1, -1};
  const std::vector<double> noise{-1.0, -1.0};  // cancels the signal exactly
  const auto d = spoofer_decisions(1, 1.0, chips, noise);
  EXPECT_EQ(d[0], 1);
  EXPECT_EQ(d[1], 1);
}

TEST(SpooferDecisions, Causal) {
  // Changing noise at sample k leaves decisions 1..k-1 untouched.
  const auto chips = chips_for(200);
  RandomStream rng(3);
  std::vector<double> noise(200);
  for (auto& v : noise) v = 1430.0 * rng.normal();
  const auto base = spoofer_decisions(1, 100.0, chips, noise);
  for (std::size_t k : {0u, 17u, 120u, 199u}) {
    auto perturbed = noise;
    perturbed[k] += 1e5;
    const auto d = spoofer_decisions(1, 100.0, chips, perturbed);
    for (std::size_t i = 0; i < k; ++i) ASSERT_EQ(d[i], base[i]) << "k=" << k << " i=" << i;
  }
}

TEST(SpooferDecisions, SymmetricUnderSymbolAndNoiseFlip) {
  const auto chips = chips_for(300);
  RandomStream rng(5);
  std::vector<double> noise(300), neg(300);
  for (std::size_t i = 0; i < 300; ++i) {
    noise[i] = 1430.0 * rng.normal();
    neg[i] = -noise[i];
  }
  const auto a = spoofer_decisions(1, 100.0, chips, noise);
  const auto b = spoofer_decisions(-1, 100.0, chips, neg);
  for (std::size_t i = 0; i < 300; ++i)
    if (a[i] != 0) EXPECT_EQ(a[i], -b[i]);
}

TEST(SpooferDecisions, LengthMismatchThrows) {
  const auto chips = chips_for(10);
  EXPECT_THROW(spoofer_decisions(1, 1.0, chips, std::vector<double>(9)), std::invalid_argument);
}

TEST(SpooferEstimateStream, ErrorRateAtDecisionTime) {
  const double fs = 4.092e6;
  const double t = spoofer_decision_time(45.0, 0.1);
  const auto m = static_cast<std::size_t>(std::llround(t * fs));
  const auto chips = chips_for(m);
  RandomStream rng(17);
  const int trials = 20000;
  int errors = 0;
  for (int i = 0; i < trials; ++i) {
    const int b = rng.sign();
    const auto tr = spoofer_estimate_stream(b, 45.0, chips, fs, rng);
    if (tr.decisions[m - 1] != b) ++errors;
  }
  const double rate = static_cast<double>(errors) / trials;
  EXPECT_NEAR(rate, 0.1, 4.0 * std::sqrt(0.09 / trials));
}

TEST(TransmittedSymbols, Policies) {
  SpooferDecisionTrace tr;
  tr.decisions = {-1, -1, 1, 1, 1, -1};
  EXPECT_EQ(transmitted_symbols(AttackKind::estimated_value, tr, 3, 1), tr.decisions);
  EXPECT_EQ(transmitted_symbols(AttackKind::random_value, tr, 3, -1),
            (std::vector<std::int8_t>{-1, -1, -1, 1, 1, 1}));
  EXPECT_EQ(transmitted_symbols(AttackKind::zero_value, tr, 2, 1),
            (std::vector<std::int8_t>{0, 0, -1, -1, -1, -1}));
  // Boundary beyond the window: blind for the whole window.
  EXPECT_EQ(transmitted_symbols(AttackKind::zero_value, tr, 10, 1), std::vector<std::int8_t>(6, 0));
  EXPECT_THROW(transmitted_symbols(AttackKind::none, tr, 1, 1), std::invalid_argument);
}

TEST(GuessDuration, DefaultsToTenPercentPoint) {
  AttackModel a{AttackKind::random_value, std::nullopt};
  EXPECT_NEAR(resolved_guess_duration(a, 45.0), spoofer_decision_time(45.0, 0.1), 1e-15);
  a.guess_duration_s = 1e-5;
  EXPECT_DOUBLE_EQ(resolved_guess_duration(a, 45.0), 1e-5);
  EXPECT_EQ(guess_samples(1e-9, 4.092e6), 1u);
  EXPECT_EQ(guess_samples(25.97e-6, 4.092e6), 106u);
}

TEST(SpoofedBeginWindow, RotationAndAmplitude) {
  ScenarioConfig c;
  const auto w = begin_window(c);
  const auto chips = chips_for(w.length);
  RandomStream rng(2);
  const auto tr = spoofer_estimate_stream(1, 45.0, chips, c.sample_rate_hz, rng);
  AttackModel a{AttackKind::estimated_value, std::nullopt};
  const auto blk = spoofed_begin_window(a, tr, 2.0, 0.7, chips, w, c.sample_rate_hz, 1, 1);
  for (std::size_t n = 0; n < blk.size(); ++n) {
    EXPECT_NEAR(std::abs(blk.samples[n]), 2.0, 1e-12);
    EXPECT_NEAR(std::arg(blk.samples[n] * static_cast<double>(tr.decisions[n] * chips[n])), 0.7, 1e-12);
  }
}

TEST(EndWindowSymbol, FollowsClosedFormErrorRate) {
  AttackModel a;
  const double t = 3.75e-3;
  const double pe = symbol_error_prob(30.0, t);
  RandomStream rng(8);
  int errors = 0;
  const int trials = 200000;
  for (int i = 0; i < trials; ++i)
    if (end_window_symbol(a, 30.0, t, 1, rng) != 1) ++errors;
  EXPECT_NEAR(static_cast<double>(errors) / trials, pe, 5 * std::sqrt(pe / trials) + 1e-6);
  EXPECT_THROW(end_window_symbol(a, 30.0, 5e-3, 1, rng), std::invalid_argument);
  EXPECT_THROW(end_window_symbol({AttackKind::none, {}}, 30.0, t, 1, rng), std::invalid_argument);
}

TEST(EndWindowSymbol, HighCn0IsAlmostAlwaysRight) {
  AttackModel a;
  RandomStream rng(9);
  for (int i = 0; i < 10000; ++i) EXPECT_EQ(end_window_symbol(a, 40.0, 3.75e-3, -1, rng), -1);
}

}  // namespace
}  // namespace scer
