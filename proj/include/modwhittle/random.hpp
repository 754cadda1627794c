#pragma once

#include <cstdint>
#include <random>

#include "modwhittle/core.hpp"

namespace modwhittle {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `index` of a master seed; independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Uniform draw in [0, 1) keyed by (seed, counter), with no generator state.
double counter_uniform(std::uint64_t seed, std::uint64_t counter);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }
  /// Proper complex normal with E|z|^2 = variance (each part variance/2).
  cplx complex_normal(double variance = 1.0);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace modwhittle
