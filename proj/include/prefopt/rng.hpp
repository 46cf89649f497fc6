#pragma once

#include <cstdint>
#include <cmath>

namespace prefopt {

// 64-bit finalizer from the splitmix64 generator (Steele, Lea, Flood 2014).
// Bijective, so distinct inputs give distinct outputs.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based generator with bit-exact output on every platform.
// One raw draw per next(); normal() consumes exactly two raw draws.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1), never returns an endpoint.
  double uniform_open01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. No spare caching: every call costs two
  // raw draws, which keeps stream accounting uniform across call sites.
  double normal() {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  constexpr std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Role tags for the per-trial randomness sources. Streams derived with
// distinct tags never share state.
namespace role {
inline constexpr std::uint64_t perturbation = 0x706572747572624Dull;
inline constexpr std::uint64_t objective_noise_1 = 0x6E6F6973652D3141ull;
inline constexpr std::uint64_t objective_noise_2 = 0x6E6F6973652D3242ull;
inline constexpr std::uint64_t init = 0x696E69742D736565ull;
}  // namespace role

// FNV-1a over a string id. Used to key method streams by name rather than
// by list position.
inline constexpr std::uint64_t fnv1a64(const char* s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (; *s; ++s) {
    h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(*s));
    h *= 0x100000001B3ull;
  }
  return h;
}

// Seed-derivation chain: each component is folded through the finalizer,
// so (base, a, b) and (base, b, a) land on unrelated streams.
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) {
  return mix64(mix64(base + 0x9E3779B97F4A7C15ull) ^ (a + 0x9E3779B97F4A7C15ull));
}
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                           std::uint64_t b) {
  return derive_seed(derive_seed(base, a), b);
}
inline constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                           std::uint64_t b, std::uint64_t c) {
  return derive_seed(derive_seed(base, a, b), c);
}

}  // namespace prefopt
