#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace orbtriage {

// SplitMix64 finalizer (Steele, Lea & Flood constants).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

// Deterministic stream generator. All randomness in the project flows through
// this type so results are bit-identical across platforms and thread counts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    return mix64(z);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n) via rejection.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t rem = (static_cast<std::uint64_t>(-1) % n + 1) % n;
    const std::uint64_t limit = static_cast<std::uint64_t>(-1) - rem;
    std::uint64_t r;
    do {
      r = next();
    } while (r > limit);
    return r % n;
  }

  // Standard normal via the Marsaglia polar method (log/sqrt only).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

namespace detail {
inline std::uint64_t fold_key(std::uint64_t key, std::string_view part) {
  return mix64(key ^ fnv1a64(part));
}
inline std::uint64_t fold_key(std::uint64_t key, std::uint64_t part) {
  return mix64(key ^ mix64(part + 0x9E3779B97F4A7C15ull));
}
inline std::uint64_t fold_key(std::uint64_t key, int part) {
  return fold_key(key, static_cast<std::uint64_t>(part));
}
}  // namespace detail

// Stream key from a seed plus a path of string/integer parts; any record or
// decision in the pipeline can be re-derived in isolation from its key.
template <class... Parts>
std::uint64_t derive_key(std::uint64_t seed, Parts&&... parts) {
  std::uint64_t key = mix64(seed + 0x9E3779B97F4A7C15ull);
  ((key = detail::fold_key(key, parts)), ...);
  return key;
}

}  // namespace orbtriage
