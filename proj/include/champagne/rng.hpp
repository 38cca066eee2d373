#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace champagne {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Counter-based stream: the key is the user seed, the high half of the counter is the stream id
/// (trial index, shell index, ...) and the low half counts blocks. Streams never overlap, and the
/// draw sequence of a stream depends only on (seed, stream), not on scheduling.
///
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint32_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        streamLo_(static_cast<std::uint32_t>(stream)),
        streamHi_(static_cast<std::uint32_t>(stream >> 32)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (used_ == 4) refill();
    return buffer_[used_++];
  }

  std::uint64_t next64() {
    const std::uint64_t hi = (*this)();
    const std::uint64_t lo = (*this)();
    return (hi << 32) | lo;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next64() >> 11) * 0x1.0p-53; }

  /// Standard normal deviate (Box-Muller, both outputs used).
  double gaussian() {
    if (hasSpare_) {
      hasSpare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    hasSpare_ = true;
    return r * std::cos(a);
  }

  /// Uniform direction on S^{d-1}: a normalized Gaussian vector.
  void direction(int d, double* out) {
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (int i = 0; i < d; ++i) {
        out[i] = gaussian();
        n2 += out[i] * out[i];
      }
    } while (n2 == 0.0);
    const double inv = 1.0 / std::sqrt(n2);
    for (int i = 0; i < d; ++i) out[i] *= inv;
  }

 private:
  void refill() {
    buffer_ = Philox4x32::block({blockLo_, blockHi_, streamLo_, streamHi_}, key_);
    if (++blockLo_ == 0) ++blockHi_;
    used_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t streamLo_;
  std::uint32_t streamHi_;
  std::uint32_t blockLo_ = 0;
  std::uint32_t blockHi_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
  bool hasSpare_ = false;
  double spare_ = 0.0;
};

}  // namespace champagne
