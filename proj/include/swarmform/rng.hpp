#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace swarmform {

/// mt19937_64 with in-house sampling so that draws are bit-identical across
/// standard library implementations (std::uniform_int_distribution is not).
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  /// Unbiased uniform index in [0, n), n >= 1. Rejection sampling.
  std::size_t pick_index(std::size_t n) {
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t bound = max - max % span;  // multiple of span
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= bound);
    return static_cast<std::size_t>(x % span);
  }

  /// Uniform double in [0, 1) on a 2^-53 grid.
  double unit_draw() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  friend bool operator==(const DeterministicRng& a, const DeterministicRng& b) {
    return a.engine_ == b.engine_;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace swarmform
