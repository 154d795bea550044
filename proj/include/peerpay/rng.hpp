#pragma once

#include <cstdint>

namespace peerpay {

// Fixed 64-bit generator with a stable cross-platform output sequence, so a
// seeded experiment reproduces byte for byte on any build.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Unbiased draw from {0, ..., bound - 1} by rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Unbiased draw from {lo, ..., hi}, both bounds inclusive.
  int uniform(int lo, int hi) {
    return lo + static_cast<int>(
                    next_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

 private:
  std::uint64_t state_;
};

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Generator for one work item of a seeded run.  Finalizing both halves of the
// key decorrelates streams across indices, so splitting the items over any
// number of workers cannot change what each item draws.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(detail::mix64(seed) ^
                    detail::mix64(0x9E3779B97F4A7C15ULL * (index + 1)));
}

}  // namespace peerpay
