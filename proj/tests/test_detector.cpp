#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "scer/detector.hpp"
#include "scer/random.hpp"

namespace scer {
namespace {

PartialCorrelationPair pair(cplx b, cplx e) { return {b, e, 0, true}; }

std::vector<PartialCorrelationPair> random_pairs(std::size_t n, std::uint64_t seed, double mean = 10.0) {
  RandomStream rng(seed);
  std::vector<PartialCorrelationPair> out;
  for (std::size_t k = 0; k < n; ++k)
    out.push_back(pair({mean + rng.normal(), rng.normal()}, {mean + rng.normal(), rng.normal()}));
  return out;
}

TEST(DetectorNames, RoundTripAndErrors) {
  for (auto d : kAllDetectors) EXPECT_EQ(parse_detector(detector_name(d)), d);
  EXPECT_EQ(parse_detector("r3"), Detector::r3);
  try {
    parse_detector("R7");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("R1, R2, R3, R4, R5"), std::string::npos);
  }
}

TEST(PartialCorrelation, ConjugatesReplica) {
  const std::vector<cplx> y{{1, 2}, {3, -1}};
  const std::vector<cplx> x{{0, 1}, {1, 0}};
  EXPECT_EQ(partial_correlation(y, x), cplx(1, 2) * cplx(0, -1) + cplx(3, -1));
  EXPECT_THROW(partial_correlation(y, std::vector<cplx>{{1, 0}}), std::invalid_argument);
}

TEST(StripSign, Basics) {
  EXPECT_EQ(strip_symbol_sign({2, -3}, -1), cplx(-2, 3));
  EXPECT_EQ(strip_symbol_sign({2, -3}, 1), cplx(2, -3));
  EXPECT_THROW(strip_symbol_sign({1, 0}, 0), std::invalid_argument);
}

TEST(Statistics, HandComputedValues) {
  const std::vector<PartialCorrelationPair> p{pair({2, 0}, {1, 0}), pair({2, 2}, {1, 0})};
  // sum_beg = 4+2j, sum_end = 2
  EXPECT_NEAR(*r1(p), std::abs(cplx(2, 1)), 1e-15);
  EXPECT_NEAR(*r2(p), std::abs(cplx(1, 1)), 1e-15);
  EXPECT_NEAR(*r3(p), std::abs(cplx(1, 1)), 1e-15);
  EXPECT_NEAR(*r5(p), std::atan2(2.0, 4.0), 1e-15);
}

TEST(Statistics, IdenticalWindowsGiveNullValues) {
  std::vector<PartialCorrelationPair> p;
  for (auto& q : random_pairs(50, 3)) p.push_back(pair(q.b_beg, q.b_beg));
  EXPECT_NEAR(*r1(p), 1.0, 1e-14);
  EXPECT_NEAR(*r2(p), 0.0, 1e-14);
  EXPECT_NEAR(*r3(p), 0.0, 1e-14);
  EXPECT_NEAR(*r4(p, 1e-3, 1e-3), 0.0, 1e-12);
  EXPECT_NEAR(*r5(p), 0.0, 1e-14);
}

TEST(Statistics, ZeroEndSumIsInvalid) {
  const std::vector<PartialCorrelationPair> p{pair({1, 0}, {1, 0}), pair({1, 0}, {-1, 0})};
  EXPECT_FALSE(r1(p).has_value());
  EXPECT_FALSE(r2(p).has_value());
  EXPECT_FALSE(r5(p).has_value());
  const auto s = compute_statistics(p, 1e-3, 1e-3);
  EXPECT_FALSE(s.is_valid(Detector::r1));
  EXPECT_TRUE(std::isnan(s[Detector::r1]));
  EXPECT_TRUE(s.is_valid(Detector::r3));
}

TEST(Statistics, EmptyInputThrows) {
  const std::vector<PartialCorrelationPair> none;
  EXPECT_THROW(r1(none), std::invalid_argument);
  EXPECT_THROW(r3(none), std::invalid_argument);
  EXPECT_THROW(r4(none, 1e-3, 1e-3), std::invalid_argument);
  EXPECT_THROW(compute_statistics(none, 1e-3, 1e-3), std::invalid_argument);
}

TEST(Statistics, UnstrippedPairsRejected) {
  std::vector<PartialCorrelationPair> p{{cplx(1, 0), cplx(1, 0), 0, false}};
  EXPECT_THROW(compute_statistics(p, 1e-3, 1e-3), std::invalid_argument);
}

TEST(Statistics, UnequalWindowsDisableDifferenceDetectors) {
  const auto p = random_pairs(20, 4);
  const auto s = compute_statistics(p, 125e-6, 250e-6);
  EXPECT_TRUE(s.is_valid(Detector::r1));
  EXPECT_FALSE(s.is_valid(Detector::r2));
  EXPECT_FALSE(s.is_valid(Detector::r3));
  EXPECT_TRUE(s.is_valid(Detector::r4));
  EXPECT_TRUE(s.is_valid(Detector::r5));
}

TEST(Statistics, R5InRangeAndWrapped) {
  const std::vector<PartialCorrelationPair> p{pair(std::polar(1.0, 3.0), std::polar(1.0, -3.0))};
  EXPECT_NEAR(*r5(p), 2 * std::numbers::pi - 6.0, 1e-12);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto v = *r5(random_pairs(3, seed, 0.0));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, std::numbers::pi);
  }
}

TEST(Nwpr, HandComputedValue) {
  const std::vector<cplx> v{{1, 0}, {1, 0}, {1, 0}, {0, 0}};
  const auto e = nwpr_cn0(v, 1e-3);
  ASSERT_TRUE(e.valid);
  EXPECT_FALSE(e.saturated);
  EXPECT_DOUBLE_EQ(e.np, 3.0);
  EXPECT_NEAR(e.cn0_dbhz, 10.0 * std::log10(2000.0), 1e-12);
}

TEST(Nwpr, SaturationIsFlaggedBothWays) {
  const auto high = nwpr_cn0(std::vector<cplx>{{1, 0}, {1, 0}, {1, 0}}, 1e-3);
  EXPECT_TRUE(high.valid);
  EXPECT_TRUE(high.saturated);
  EXPECT_TRUE(std::isfinite(high.cn0_dbhz));
  const auto low = nwpr_cn0(std::vector<cplx>{{1, 0}, {-1, 0}}, 1e-3);
  EXPECT_TRUE(low.saturated);
  EXPECT_TRUE(std::isfinite(low.cn0_dbhz));
  EXPECT_THROW(nwpr_cn0(std::vector<cplx>{{1, 0}}, 1e-3), std::invalid_argument);
  EXPECT_THROW(nwpr_cn0(std::vector<cplx>{{1, 0}, {1, 0}}, 0.0), std::invalid_argument);
}

TEST(Nwpr, UnbiasedAtModerateSnr) {
  // Block correlator values A N + noise of variance N sigma^2 with sigma^2 = fs.
  const double fs = 4.092e6, w = 1e-3, a = 100.0;
  const double n = w * fs;
  const double sd = std::sqrt(n * fs / 2.0);
  RandomStream rng(31);
  double mean = 0.0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    std::vector<cplx> v(50);
    for (auto& x : v) x = cplx(a * n + sd * rng.normal(), sd * rng.normal());
    mean += nwpr_cn0(v, w).cn0_dbhz;
  }
  EXPECT_NEAR(mean / trials, 40.0, 0.5);
}

TEST(CorrelationSums, AddMatchesBatch) {
  const auto p = random_pairs(30, 8);
  CorrelationSums s;
  for (const auto& q : p) s.add(q);
  const auto t = CorrelationSums::of(p);
  EXPECT_EQ(s.sum_beg, t.sum_beg);
  EXPECT_EQ(s.power_end, t.power_end);
  EXPECT_EQ(s.count, 30u);
}

}  // namespace
}  // namespace scer
