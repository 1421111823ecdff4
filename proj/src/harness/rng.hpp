#pragma once

#include <cstdint>
#include <random>

namespace stride::harness {

/// Seeded source shared by one scenario run. Never shared across runs.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal(double sigma) { return sigma > 0.0 ? std::normal_distribution<double>(0.0, sigma)(engine_) : 0.0; }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  bool coin() { return (engine_() >> 63) != 0; }
  std::mt19937_64& engine() { return engine_; }

private:
  std::mt19937_64 engine_;
};

} // namespace stride::harness
