#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <boost/random/mersenne_twister.hpp>

#include <boost/random/normal_distribution.hpp>

namespace scer {

/// SplitMix64 finalizer; used to turn structured tags into engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t + 0x632BE59BD9B4E019ULL));
  return h;
}

/// Independent sub-streams of one trial. Each kind is consumed in a fixed
/// per-symbol pattern, so trial k with N_b symbols is a prefix of the same
/// trial with more symbols.
enum class StreamKind : std::uint64_t {
  code = 1,
  symbols = 2,
  spoofer = 3,
  noise = 4,
  channel = 5,
  phase = 6,
  attack = 7,
};

enum class TrialPurpose : std::uint64_t {
  calibration = 1,
  verification = 2,
  detection = 3,
};

inline std::uint64_t trial_stream_seed(std::uint64_t master, TrialPurpose purpose,
                                       std::uint64_t trial_index, StreamKind kind) noexcept {
  return derive_seed(master, {static_cast<std::uint64_t>(purpose), trial_index,
                              static_cast<std::uint64_t>(kind)});
}

/// Seeded 64-bit Mersenne Twister with a ziggurat normal sampler. Boost's
/// sampler is used instead of std::normal_distribution because its output
/// sequence is specified, so runs reproduce across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  int sign() { return (engine_() >> 63) != 0 ? -1 : 1; }

  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

  std::uint64_t bits() { return engine_(); }

 private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace scer
