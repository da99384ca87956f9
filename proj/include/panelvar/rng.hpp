#pragma once

#include <cstdint>

namespace panelvar {

// SplitMix64 (Steele, Lea & Flood 2014), the fixed generator for everything
// random in this project. 64-bit counter state with an avalanching output
// mix, so substreams derived from (seed, index) are independent of scheduling
// order and reproducible across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Substream `index` of a master seed.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(index + 0xbf58476d1ce4e5b9ULL));
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    return mix(z);
  }

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform01() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  // Uniform integer in [0, n) via Lemire's multiply-shift rejection method.
  std::uint64_t bounded(std::uint64_t n) {
    for (;;) {
      std::uint64_t x = next();
      __uint128_t m = static_cast<__uint128_t>(x) * n;
      std::uint64_t lo = static_cast<std::uint64_t>(m);
      if (lo >= n || lo >= (0ULL - n) % n) return static_cast<std::uint64_t>(m >> 64);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace panelvar
