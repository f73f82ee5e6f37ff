#pragma once

// Partial correlations over begin/end windows and the five replay-attack
// statistics built from them.

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scer/waveform.hpp"

namespace scer {

enum class Detector { r1 = 0, r2 = 1, r3 = 2, r4 = 3, r5 = 4 };
inline constexpr std::size_t kDetectorCount = 5;
inline constexpr std::array<Detector, kDetectorCount> kAllDetectors = {
    Detector::r1, Detector::r2, Detector::r3, Detector::r4, Detector::r5};

inline std::string_view detector_name(Detector d) {
  static constexpr std::array<std::string_view, kDetectorCount> names = {"R1", "R2", "R3", "R4", "R5"};
  return names[static_cast<std::size_t>(d)];
}

inline Detector parse_detector(std::string_view name) {
  std::string upper(name);
  for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (auto d : kAllDetectors)
    if (detector_name(d) == upper) return d;
  throw std::invalid_argument("unknown detector '" + std::string(name) + "'; valid names: R1, R2, R3, R4, R5");
}

struct PartialCorrelationPair {
  cplx b_beg{};
  cplx b_end{};
  std::int64_t symbol_index = 0;
  bool symbol_sign_stripped = false;
};

/// sum block(n) * conj(replica(n)).
inline cplx partial_correlation(std::span<const cplx> block, std::span<const cplx> replica) {
  if (block.size() != replica.size())
    throw std::invalid_argument("partial_correlation: block and replica lengths differ (" +
                                std::to_string(block.size()) + " vs " + std::to_string(replica.size()) + ")");
  cplx acc{};
  for (std::size_t n = 0; n < block.size(); ++n) acc += block[n] * std::conj(replica[n]);
  return acc;
}

inline cplx partial_correlation(const ComplexSampleBlock& block, const ComplexSampleBlock& replica) {
  return partial_correlation(std::span<const cplx>(block.samples), std::span<const cplx>(replica.samples));
}

/// Removes the (cryptographically verified) symbol sign.
inline cplx strip_symbol_sign(cplx raw, int b_k) {
  if (b_k != 1 && b_k != -1) throw std::invalid_argument("strip_symbol_sign: symbol must be +1 or -1");
  return static_cast<double>(b_k) * raw;
}

/// Running sums sufficient for every statistic.
struct CorrelationSums {
  cplx sum_beg{};
  cplx sum_end{};
  double power_beg = 0.0;
  double power_end = 0.0;
  std::size_t count = 0;

  void add(cplx b_beg, cplx b_end) {
    sum_beg += b_beg;
    sum_end += b_end;
    power_beg += std::norm(b_beg);
    power_end += std::norm(b_end);
    ++count;
  }
  void add(const PartialCorrelationPair& p) { add(p.b_beg, p.b_end); }

  static CorrelationSums of(std::span<const PartialCorrelationPair> pairs) {
    CorrelationSums s;
    for (const auto& p : pairs) s.add(p);
    return s;
  }
};

namespace detail {

inline void require_pairs(std::span<const PartialCorrelationPair> pairs) {
  if (pairs.empty()) throw std::invalid_argument("detector statistic needs at least one pair");
}

inline std::optional<double> ratio_stat(const CorrelationSums& s, double offset) {
  if (s.sum_end == cplx{}) return std::nullopt;
  return std::abs(s.sum_beg / s.sum_end - offset);
}

inline double wrap_pi(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

}  // namespace detail

inline std::optional<double> r1(const CorrelationSums& s) { return detail::ratio_stat(s, 0.0); }
inline std::optional<double> r2(const CorrelationSums& s) { return detail::ratio_stat(s, 1.0); }

inline std::optional<double> r3(const CorrelationSums& s) {
  if (s.count == 0) return std::nullopt;
  return std::abs((s.sum_beg - s.sum_end) / static_cast<double>(s.count));
}

inline std::optional<double> r5(const CorrelationSums& s) {
  if (s.sum_beg == cplx{} || s.sum_end == cplx{}) return std::nullopt;
  return std::abs(detail::wrap_pi(std::arg(s.sum_beg) - std::arg(s.sum_end)));
}

/// |sum B_beg / sum B_end|.
inline std::optional<double> r1(std::span<const PartialCorrelationPair> pairs) {
  detail::require_pairs(pairs);
  return r1(CorrelationSums::of(pairs));
}

/// |sum B_beg / sum B_end - 1|.
inline std::optional<double> r2(std::span<const PartialCorrelationPair> pairs) {
  detail::require_pairs(pairs);
  return r2(CorrelationSums::of(pairs));
}

/// |mean(B_beg - B_end)|.
inline std::optional<double> r3(std::span<const PartialCorrelationPair> pairs) {
  detail::require_pairs(pairs);
  return r3(CorrelationSums::of(pairs));
}

/// |wrap(arg sum B_beg - arg sum B_end)| in [0, pi].
inline std::optional<double> r5(std::span<const PartialCorrelationPair> pairs) {
  detail::require_pairs(pairs);
  return r5(CorrelationSums::of(pairs));
}

inline constexpr double kNpClampEpsilon = 1e-9;

struct NwprEstimate {
  double wbp = 0.0;
  double nbp = 0.0;
  double np = 0.0;  // before clamping
  double cn0_dbhz = 0.0;
  bool saturated = false;
  bool valid = false;
};

/// Narrowband/wideband power ratio C/N0 estimate from block sums.
inline NwprEstimate nwpr_cn0(cplx sum, double power, std::size_t n_b, double window_s) {
  if (!(window_s > 0.0)) throw std::invalid_argument("nwpr_cn0: window must be positive");
  NwprEstimate e;
  e.wbp = power;
  e.nbp = std::norm(sum);
  if (n_b < 2 || !(power > 0.0)) return e;
  e.np = e.nbp / e.wbp;
  const double nb = static_cast<double>(n_b);
  double np = e.np;
  if (np < 1.0 + kNpClampEpsilon) {
    np = 1.0 + kNpClampEpsilon;
    e.saturated = true;
  } else if (np > nb - kNpClampEpsilon) {
    np = nb - kNpClampEpsilon;
    e.saturated = true;
  }
  e.cn0_dbhz = 10.0 * std::log10((np - 1.0) / (nb - np) / window_s);
  e.valid = true;
  return e;
}

inline NwprEstimate nwpr_cn0(std::span<const cplx> values, double window_s) {
  if (values.size() < 2) throw std::invalid_argument("nwpr_cn0: needs at least two values");
  cplx sum{};
  double power = 0.0;
  for (auto v : values) {
    sum += v;
    power += std::norm(v);
  }
  return nwpr_cn0(sum, power, values.size(), window_s);
}

/// |C/N0 estimate (begin) - C/N0 estimate (end)|.
inline std::optional<double> r4(const CorrelationSums& s, double window_begin_s, double window_end_s) {
  const auto b = nwpr_cn0(s.sum_beg, s.power_beg, s.count, window_begin_s);
  const auto e = nwpr_cn0(s.sum_end, s.power_end, s.count, window_end_s);
  if (!b.valid || !e.valid) return std::nullopt;
  return std::abs(b.cn0_dbhz - e.cn0_dbhz);
}

inline std::optional<double> r4(std::span<const PartialCorrelationPair> pairs, double window_begin_s,
                                double window_end_s) {
  detail::require_pairs(pairs);
  return r4(CorrelationSums::of(pairs), window_begin_s, window_end_s);
}

struct DetectorStatistics {
  std::array<double, kDetectorCount> value{};
  std::array<bool, kDetectorCount> valid{};
  double psi_beg = 0.0;
  double psi_end = 0.0;
  NwprEstimate nwpr_beg;
  NwprEstimate nwpr_end;

  double operator[](Detector d) const { return value[static_cast<std::size_t>(d)]; }
  bool is_valid(Detector d) const { return valid[static_cast<std::size_t>(d)]; }
};

/// All five statistics. R2 and R3 compare begin and end sums directly, so
/// they are only defined for equal window lengths.
inline DetectorStatistics statistics_from_sums(const CorrelationSums& s, double window_begin_s,
                                               double window_end_s) {
  DetectorStatistics out;
  const bool equal_windows = window_begin_s == window_end_s;
  auto put = [&](Detector d, std::optional<double> v, bool allowed = true) {
    const auto i = static_cast<std::size_t>(d);
    out.valid[i] = allowed && v.has_value() && std::isfinite(*v);
    out.value[i] = out.valid[i] ? *v : std::numeric_limits<double>::quiet_NaN();
  };
  put(Detector::r1, r1(s));
  put(Detector::r2, r2(s), equal_windows);
  put(Detector::r3, r3(s), equal_windows);
  put(Detector::r4, r4(s, window_begin_s, window_end_s));
  put(Detector::r5, r5(s));
  out.psi_beg = std::arg(s.sum_beg);
  out.psi_end = std::arg(s.sum_end);
  out.nwpr_beg = nwpr_cn0(s.sum_beg, s.power_beg, s.count, window_begin_s);
  out.nwpr_end = nwpr_cn0(s.sum_end, s.power_end, s.count, window_end_s);
  return out;
}

inline DetectorStatistics compute_statistics(std::span<const PartialCorrelationPair> pairs,
                                             double window_begin_s, double window_end_s) {
  detail::require_pairs(pairs);
  for (const auto& p : pairs)
    if (!p.symbol_sign_stripped) throw std::invalid_argument("compute_statistics: pairs must be sign-stripped");
  return statistics_from_sums(CorrelationSums::of(pairs), window_begin_s, window_end_s);
}

}  // namespace scer
