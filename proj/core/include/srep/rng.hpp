#pragma once

#include <cstdint>

namespace srep {

// Counter-based generator used for all simulation randomness.
//
// Output word i of stream `key` is splitmix64(key + i * GOLDEN), a stateless
// (key, counter) -> uint64 map, so any position of any stream can be computed
// independently of the others. Streams are split by key arithmetic alone:
// simulation draw k runs on key = master_seed XOR k, bootstrap replicate r on
// key = master_seed XOR (0x9E37 + r). Identical (seed, config) therefore
// reproduces identical output byte for byte regardless of how draws are
// scheduled across threads.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static CounterRng for_draw(std::uint64_t master_seed, std::uint64_t draw) {
    return CounterRng(master_seed ^ draw);
  }

  std::uint64_t next_u64() {
    std::uint64_t z = key_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace srep
