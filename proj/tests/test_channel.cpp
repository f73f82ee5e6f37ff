#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "scer/channel.hpp"
#include "scer/stats.hpp"

namespace scer {
namespace {

TEST(CoherenceTime, ReferenceValues) {
  EXPECT_NEAR(coherence_time(27.78), 0.006850024218803631, 1e-15);
  EXPECT_NEAR(coherence_time(83.3), 0.0022844378487198664, 1e-15);
  EXPECT_NEAR(coherence_time(100.0 / 3.6), 0.006850572220741136, 1e-15);
  EXPECT_TRUE(std::isinf(coherence_time(0.0)));
  EXPECT_THROW(coherence_time(-1.0), std::invalid_argument);
}

TEST(CoherenceTime, InverselyProportionalToSpeed) {
  for (double v : {1.0, 5.0, 30.0, 90.0}) EXPECT_NEAR(coherence_time(v) * v, coherence_time(1.0), 1e-15);
}

TEST(Awgn, VarianceAndBypass) {
  ComplexSampleBlock blk;
  blk.samples.assign(200000, cplx(0.0, 0.0));
  RandomStream rng(4);
  const auto noisy = add_awgn(blk, 4.0, rng);
  double re2 = 0.0, im2 = 0.0, cross = 0.0;
  for (auto s : noisy.samples) {
    re2 += s.real() * s.real();
    im2 += s.imag() * s.imag();
    cross += s.real() * s.imag();
  }
  const double n = 200000.0;
  EXPECT_NEAR(re2 / n, 2.0, 0.03);
  EXPECT_NEAR(im2 / n, 2.0, 0.03);
  EXPECT_NEAR(cross / n, 0.0, 0.03);
  RandomStream rng2(4);
  const auto same = add_awgn(blk, 4.0, rng2, true);
  EXPECT_EQ(same.samples, blk.samples);
}

TEST(Awgn, Deterministic) {
  ComplexSampleBlock blk;
  blk.samples.assign(100, cplx(1.0, 0.0));
  RandomStream a(7), b(7);
  EXPECT_EQ(add_awgn(blk, 1.0, a).samples, add_awgn(blk, 1.0, b).samples);
}

TEST(Lms, ValidateRejectsBadParams) {
  LmsParams p;
  EXPECT_NO_THROW(validate(p));
  p.good.mean_dwell_s = 0.0;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = LmsParams{};
  p.receiver_speed_mps = -1.0;
  EXPECT_THROW(validate(p), std::invalid_argument);
}

TEST(Lms, StaticReceiverFreezesGain) {
  LmsParams p;
  p.receiver_speed_mps = 0.0;
  const auto s = lms_gain_series(p, 500, 4e-3, 3.75e-3, RandomStream(5));
  for (std::size_t k = 0; k < 500; ++k) {
    EXPECT_EQ(s.begin_gain[k], s.begin_gain[0]);
    EXPECT_EQ(s.end_gain[k], s.begin_gain[0]);
    EXPECT_EQ(s.state[k], s.state[0]);
  }
}

TEST(Lms, GoodStateFractionMatchesDwellRatio) {
  // 10^6 symbols (4000 s, about 1000 state sojourns).
  LmsParams p;
  const auto s = lms_gain_series(p, 1000000, 4e-3, 3.75e-3, RandomStream(11));
  std::size_t good = 0;
  for (auto st : s.state) good += st == LmsState::good;
  const double expected = p.good.mean_dwell_s / (p.good.mean_dwell_s + p.bad.mean_dwell_s);
  EXPECT_NEAR(static_cast<double>(good) / 1e6, expected, 0.05 * expected);
}

TEST(Lms, MeanPowerPerState) {
  LmsParams p;
  const auto s = lms_gain_series(p, 400000, 4e-3, 3.75e-3, RandomStream(12));
  double good_db = 0.0, bad_db = 0.0;
  std::size_t ng = 0, nb = 0;
  for (std::size_t k = 0; k < s.state.size(); ++k) {
    const double db = 10.0 * std::log10(std::norm(s.begin_gain[k]));
    if (s.state[k] == LmsState::good) {
      good_db += db;
      ++ng;
    } else {
      bad_db += db;
      ++nb;
    }
  }
  EXPECT_NEAR(good_db / ng, p.good.direct_mean_db, 0.5);
  EXPECT_NEAR(bad_db / nb, p.bad.direct_mean_db, 1.0);
}

TEST(Lms, GainsWithinSymbolAreCorrelatedAtLowSpeed) {
  LmsParams p;
  p.receiver_speed_mps = 1.0;  // Tc ~ 0.19 s
  const auto s = lms_gain_series(p, 2000, 4e-3, 3.75e-3, RandomStream(13));
  double diff = 0.0;
  for (std::size_t k = 0; k < 2000; ++k) diff += std::abs(s.begin_gain[k] - s.end_gain[k]);
  EXPECT_LT(diff / 2000.0, 0.05);
}

TEST(Lms, SeriesIsPrefixConsistent) {
  LmsParams p;
  const auto a = lms_gain_series(p, 100, 4e-3, 3.75e-3, RandomStream(21));
  const auto b = lms_gain_series(p, 300, 4e-3, 3.75e-3, RandomStream(21));
  for (std::size_t k = 0; k < 100; ++k) {
    EXPECT_EQ(a.begin_gain[k], b.begin_gain[k]);
    EXPECT_EQ(a.end_gain[k], b.end_gain[k]);
  }
}

TEST(Lms, EndOffsetValidation) {
  EXPECT_THROW(lms_gain_series(LmsParams{}, 10, 4e-3, 5e-3, RandomStream(1)), std::invalid_argument);
  EXPECT_THROW(lms_gain_series(LmsParams{}, 0, 4e-3, 1e-3, RandomStream(1)), std::invalid_argument);
}

}  // namespace
}  // namespace scer
