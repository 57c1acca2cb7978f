#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace mallows {

/// xoshiro256** seeded from `seed` through splitmix64, then advanced by
/// `stream_id` jumps of 2^128 steps. Identical (seed, stream_id) pairs give
/// identical sequences on every platform; distinct stream ids never overlap
/// within 2^128 draws.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  void jump() noexcept;

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Deterministic child seed for a named sub-computation.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept;

}  // namespace mallows
