#pragma once

#include <cstdint>
#include <random>

namespace equivar {

// Seeded generator with a portable double mapping (53 high bits).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int index(int n) { return int(uniform() * n) % n; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace equivar
