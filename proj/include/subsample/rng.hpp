#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace subsample {

/// SplitMix64 finalizer; a bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child seed for stream `key` under `seed`. Streams keyed by distinct
/// (seed, key) pairs are independent of one another and of scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept {
  return mix64(mix64(seed) ^ mix64(key + 0x632be59bd9b4e019ULL));
}

/// FNV-1a over a string, used to key streams by method name.
constexpr std::uint64_t hash_name(std::string_view name) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// xoshiro256** seeded through SplitMix64. Satisfies
/// UniformRandomBitGenerator. All variate generation below is done in-house
/// so a seed reproduces the same stream on every standard library.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform integer in [0, bound), bound >= 1. Lemire's unbiased method.
  std::uint64_t below(std::uint64_t bound) noexcept;
  double normal() noexcept;
  /// Gamma(shape, 1) by Marsaglia-Tsang.
  double gamma(double shape) noexcept;
  double student_t(double df) noexcept;

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Walker/Vose alias table: O(n) build, O(1) exact categorical draws.
/// Weights need not be normalized; zero-weight categories are never drawn.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const noexcept { return accept_.size(); }
  std::size_t sample(Rng& rng) const noexcept;

 private:
  std::vector<double> accept_;
  std::vector<std::size_t> alias_;
};

}  // namespace subsample
