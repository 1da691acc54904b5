#pragma once

// Seeded random values of a full ground type. Reference positions get an
// arbitrary address in 1..8.

#include <cstdint>
#include <random>
#include <vector>

#include "secref/ground_values.hpp"

namespace secref {

class ValueSampler {
 public:
  explicit ValueSampler(std::uint64_t seed) : rng_(seed) {}

  Value sample(const TypeTag& t, int depth = 3);
  std::vector<Value> samples(const TypeTag& t, std::size_t n);

  std::int64_t small_int() { return static_cast<std::int64_t>(rng_() % 11) - 3; }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace secref
