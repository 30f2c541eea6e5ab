#pragma once

#include <cstdint>

namespace ctmdp {

/// Named random streams. Streams with distinct ids never share draws.
enum class Stream : std::uint64_t { Trajectory = 1, Coin = 2, Exploration = 3 };

/// Counter-based generator: draw k of stream (seed, id) is a fixed hash of
/// (seed, id, k). Output is identical on every platform.
class RngHandle {
 public:
  RngHandle() = default;
  RngHandle(std::uint64_t seed, Stream stream) noexcept
      : RngHandle(seed, static_cast<std::uint64_t>(stream)) {}
  RngHandle(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_(stream_id), key_(mix(mix(seed) ^ (stream_id * 0xD1B54A32D192ED03ULL))) {}

  std::uint64_t next_u64() noexcept { return mix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    // Lemire's multiply-shift; bias is below 2^-64 * n and irrelevant here.
    __extension__ using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>(next_u64()) * n) >> 64);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace ctmdp
