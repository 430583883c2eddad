#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nasbo {

/// Mixes a parent seed with a stream identifier (SplitMix64 finalizer).
/// Every random stream in the project is derived through this function so
/// that runs, replications and rounds never share a stream.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

/// Seeded random stream. The engine is std::mt19937_64 (fully specified by the
/// standard); the distributions are implemented here because the standard
/// library distributions differ between implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal draw (Marsaglia polar method, spare value discarded).
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Child stream; does not advance this stream.
  Rng child(std::uint64_t stream) const { return Rng(derive_seed(seed_hint_(), stream)); }

  // UniformRandomBitGenerator interface, for std::shuffle-like helpers.
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

 private:
  std::uint64_t seed_hint_() const;

  std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle using Rng::uniform_index (portable, unlike std::shuffle).
template <typename Container>
void shuffle(Container& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace nasbo
