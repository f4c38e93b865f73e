#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace moralvig {

/// Deterministic pseudo-random source (splitmix64).
///
/// The standard library distributions are implementation-defined, so the
/// bounded-integer, uniform and normal draws are implemented here to keep
/// folds, shuffles and t-SNE initialisation identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent seed from a base seed and a label, e.g.
// derive_seed(seed, "clifford/contextual/svm/fold2").
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

}  // namespace moralvig
