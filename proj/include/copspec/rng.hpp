#pragma once

#include <cstdint>
#include <random>

namespace copspec {

// Deterministic random stream keyed by (seed, replicate index).
//
// The pair is hashed through std::seed_seq into a 64-bit Mersenne Twister, so
// distinct indices give unrelated streams and the same pair always reproduces
// the same draws, regardless of which thread asks for it.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t replicate_index);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

RandomStream derive_stream(std::uint64_t seed, std::uint64_t replicate_index);

// Child seed for hierarchical splitting (splitmix64 finalizer on seed ^ f(index)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace copspec
