#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fcdc {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// A draw is a pure function of (key, counter), so any element of a
/// simulation can be regenerated independently of evaluation order. Every
/// stochastic routine in the workbench addresses its randomness as
/// (seed, stream, index): the seed is the key, stream and index form the
/// 128-bit counter.
class Philox4x32 {
public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Random stream addressed by (seed, stream id); draws are indexed, not
/// sequential, so results are independent of scheduling and task count.
class CounterRng {
public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  constexpr Philox4x32::Counter bits(std::uint64_t index) const noexcept {
    return Philox4x32::block({static_cast<std::uint32_t>(index),
                              static_cast<std::uint32_t>(index >> 32),
                              static_cast<std::uint32_t>(stream_),
                              static_cast<std::uint32_t>(stream_ >> 32)},
                             key_);
  }

  /// Two uniforms in the open interval (0, 1).
  std::array<double, 2> uniform2(std::uint64_t index) const noexcept {
    const auto b = bits(index);
    return {to_unit(b[0], b[1]), to_unit(b[2], b[3])};
  }

  double uniform(std::uint64_t index) const noexcept { return uniform2(index)[0]; }

  /// Two independent standard normals (Box-Muller).
  std::array<double, 2> normal2(std::uint64_t index) const noexcept {
    const auto [u1, u2] = uniform2(index);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
  }

  double normal(std::uint64_t index) const noexcept { return normal2(index)[0]; }

  std::uint64_t stream() const noexcept { return stream_; }

private:
  static double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t x = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(x) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
};

}  // namespace fcdc
