#pragma once

#include <cstdint>
#include <random>

namespace hse {

// Stateless 64-bit finalizer (SplitMix64). Used to derive child seeds.
std::uint64_t mix64(std::uint64_t x);

// Seedable, splittable generator. Every stochastic routine takes one of these
// by reference so a run can be replayed from its recorded seed.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  // Independent child stream; depends only on (seed, stream), not on how many
  // numbers this generator has produced.
  Rng split(std::uint64_t stream) const;

  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Child seed for instance `index` of a run with master seed `master`.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t index);

}  // namespace hse
