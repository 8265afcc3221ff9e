#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>
#include <string_view>
#include <utility>
#include <vector>

namespace dlad {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based SplitMix64 stream. Draw k (1-based) of a stream seeded with s
// is exactly mix64(s + k * 0x9E3779B97F4A7C15); the class just keeps the
// running counter. Streams with different seeds are independent for all
// practical purposes, and every draw is a pure function of (seed, k).
class Rng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix64(state_);
  }

  // 53-bit draw in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n) via 128-bit multiply-shift (bias < n / 2^64).
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller; consumes exactly two draws.
  double next_normal() {
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Fisher-Yates, descending index, one next_below(i + 1) per position.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(next_below(i))]);
    }
  }

 private:
  std::uint64_t state_;
};

// Stable per-purpose stream derivation:
//   h = mix64(master ^ 0x243F6A8885A308D3)
//   h = mix64(h ^ byte)  for each byte of the purpose tag, in order
//   return mix64(h ^ entity_id)
// Distinct purposes and entities give unrelated streams, so work scheduled
// in any order still consumes identical randomness.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view purpose,
                          std::uint64_t entity_id);

}  // namespace dlad
