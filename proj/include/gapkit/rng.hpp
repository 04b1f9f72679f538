#pragma once

// Seeded, splittable pseudorandomness for fixture generation. The generator
// is pinned to the SplitMix64 recurrence below so that fixtures are
// bit-identical across platforms and implementations:
//
//   state += 0x9E3779B97F4A7C15
//   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output = z ^ (z >> 31)
//
// Stream k of seed s starts from state = mix(s) + k * 0xA0761D6478BD642F,
// where mix is one application of the output function.

#include <cstdint>

#include "gapkit/int_math.hpp"

namespace gapkit {

class SplitMix64 {
 public:
  explicit SplitMix64(u64 seed) : state_(seed) {}

  u64 next() {
    state_ += 0x9E3779B97F4A7C15ull;
    u64 z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // unbiased-enough fixed-point scaling; deterministic, no rejection loop
  u64 next_below(u64 n) {
    return n == 0 ? 0 : static_cast<u64>((u128(next()) * n) >> 64);
  }

  u64 next_in(u64 lo, u64 hi) {  // inclusive bounds
    return lo + next_below(hi - lo + 1);
  }

  i64 next_in_i64(i64 lo, i64 hi) {  // inclusive bounds
    return lo + static_cast<i64>(next_below(static_cast<u64>(hi - lo + 1)));
  }

  static u64 mix(u64 x) {
    SplitMix64 g(x);
    return g.next();
  }

  // independent substream; counter-based so streams never need coordination
  static SplitMix64 stream(u64 seed, u64 stream_index) {
    return SplitMix64(mix(seed) + stream_index * 0xA0761D6478BD642Full);
  }

 private:
  u64 state_;
};

}  // namespace gapkit
