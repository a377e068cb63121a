#pragma once

// Deterministic, platform-independent randomness. The standard distributions
// and std::shuffle are implementation-defined, so every draw here is built
// directly from splitmix64 bits: identical seeds give identical streams on
// every toolchain.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

namespace patmark {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a over arbitrary byte-like data; used to hash contexts and stage labels.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::vector<std::int32_t>& values,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (std::int32_t v : values) {
    for (int shift = 0; shift < 32; shift += 8) {
      h ^= static_cast<unsigned char>(v >> shift);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

// Derive an independent stream seed from a master seed and a label. Stage
// seeds in the pipeline are all produced through this.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  std::uint64_t state = master ^ fnv1a64(label);
  return splitmix64(state);
}

// Counter-style RNG: a seed plus an advancing internal state.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Unbiased integer in [0, bound) via rejection sampling.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    while (u1 <= 0.0) u1 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  // In-place Fisher-Yates with explicit draws.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct values from [0, n), returned sorted ascending.
  std::vector<std::uint64_t> sample_sorted(std::uint64_t n, std::size_t k);

private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline std::vector<std::uint64_t> Rng::sample_sorted(std::uint64_t n,
                                                     std::size_t k) {
  // Floyd's algorithm; k is tiny relative to n in every caller.
  std::vector<std::uint64_t> chosen;
  chosen.reserve(k);
  for (std::uint64_t j = n - k; j < n; ++j) {
    const std::uint64_t t = next_below(j + 1);
    bool seen = false;
    for (std::uint64_t c : chosen) {
      if (c == t) {
        seen = true;
        break;
      }
    }
    chosen.push_back(seen ? j : t);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace patmark
