#pragma once

#include <cstdint>
#include <initializer_list>

#include "core/common.hpp"

namespace ob {

// SplitMix64 output permutation.
inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-based generator: output(i) = mix64(key + i*phi). Streams with keys
// derived from distinct tuples are independent for simulation purposes, and a
// stream replays bit-exactly from its key alone.
class CounterRng {
 public:
  explicit CounterRng(uint64_t key) : key_(key) {}

  // Key derivation for per-trial streams, e.g. {base_seed, hypothesis, trial}.
  static uint64_t derive(std::initializer_list<uint64_t> parts) {
    uint64_t k = 0x243f6a8885a308d3ull;  // arbitrary nonzero start
    for (uint64_t p : parts) k = mix64(k + 0x9e3779b97f4a7c15ull + p) ^ (k << 1);
    return mix64(k);
  }

  uint64_t next_u64() { return mix64(key_ + (++ctr_) * 0x9e3779b97f4a7c15ull); }

  // Uniform in [0, 1) with 53 random bits.
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal by Box-Muller; consumes exactly two uniforms per call.
  double next_gaussian() {
    double u1 = 1.0 - next_unit();  // (0, 1] so the log is finite
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  bool next_bernoulli(double p) { return next_unit() < p; }

 private:
  uint64_t key_;
  uint64_t ctr_ = 0;
};

}  // namespace ob
