#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace amagcn {

// Deterministic random source. All draws are derived from the raw mt19937_64
// stream with fixed conversions (std::uniform_real_distribution and friends
// are implementation-defined, so they are avoided). Independent streams are
// derived from a root seed via labeled splits, which keeps every consumer's
// draw sequence stable no matter what other components do.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t bound = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t u;
    do {
      u = next_u64();
    } while (u >= bound);
    return u % n;
  }

  // Standard normal via Box-Muller; the paired draw is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_int(i)]);
    }
  }

  // Labeled split: child seed from (seed, label, index) via FNV-1a plus a
  // splitmix64 finalizer. Streams for distinct labels/indices are unrelated.
  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                   std::uint64_t index = 0) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix_byte = [&h](std::uint8_t b) {
      h ^= b;
      h *= 1099511628211ull;
    };
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<std::uint8_t>(seed >> (8 * i)));
    for (char c : label) mix_byte(static_cast<std::uint8_t>(c));
    for (int i = 0; i < 8; ++i) mix_byte(static_cast<std::uint8_t>(index >> (8 * i)));
    // splitmix64 finalizer
    h += 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
  }

  static Rng child(std::uint64_t seed, std::string_view label, std::uint64_t index = 0) {
    return Rng(derive_seed(seed, label, index));
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace amagcn
