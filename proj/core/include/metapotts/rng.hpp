#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace metapotts {

// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t x);

// Seed of the stream for `index` under `master`:
// mix64(mix64(master) ^ mix64(index + 0x9e3779b97f4a7c15)).
// Every trial, sample or worker task draws from its own derived stream so
// results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// mt19937_64 with distribution helpers whose output is fixed across
/// standard libraries (std::uniform_*_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound); bound > 0. Lemire's rejection method.
  std::uint64_t below(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  // Index drawn proportionally to nonnegative `weights` with the given total.
  int categorical(std::span<const double> weights, double total);

 private:
  std::mt19937_64 engine_;
};

}  // namespace metapotts
