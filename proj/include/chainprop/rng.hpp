#pragma once

#include <bit>
#include <cstdint>
#include <utility>

namespace chainprop {

// Splittable 64-bit generator (SplitMix64 with per-instance gamma).
// split() yields a child stream statistically independent of the parent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gamma_(golden_gamma) {}

  std::uint64_t next_u64() { return mix64(next_seed()); }

  // Uniform in [0, bound); bound > 0. Lemire's multiply-and-reject.
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  Rng split() {
    const std::uint64_t s = mix64(next_seed());
    const std::uint64_t g = mix_gamma(next_seed());
    return Rng(s, g);
  }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  static constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

  Rng(std::uint64_t seed, std::uint64_t gamma) : seed_(seed), gamma_(gamma) {}

  std::uint64_t next_seed() { return seed_ += gamma_; }

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t mix_gamma(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    z = (z ^ (z >> 33)) | 1ULL;
    if (std::popcount(z ^ (z >> 1)) < 24) z ^= 0xaaaaaaaaaaaaaaaaULL;
    return z;
  }

  std::uint64_t seed_;
  std::uint64_t gamma_;
};

}  // namespace chainprop
