#pragma once

#include <cstdint>
#include <random>

namespace sqa::nn {

// Seeded random stream; single source of randomness per model so runs with
// equal seeds replay exactly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(engine_);
  }

  bool bernoulli(double p) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    return d(engine_) < p;
  }

  std::size_t index(std::size_t n) {
    std::uniform_int_distribution<std::size_t> d(0, n - 1);
    return d(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline constexpr double kInitScale = 0.08;  // uniform(-0.08, 0.08) parameter init

}  // namespace sqa::nn
