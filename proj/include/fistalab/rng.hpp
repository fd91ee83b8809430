#pragma once

#include <cstdint>
#include <random>

namespace fistalab {

// Seeded random source for problem construction.
//
// The raw stream is std::mt19937_64, whose state initialization and outputs
// are pinned by the C++ standard, and the conversion to doubles below uses
// only exact dyadic arithmetic. Together with the fixed-order kernels in
// vecops.hpp this makes every generated problem instance a pure function of
// (kind, dim, seed), reproducible bit-for-bit on any conforming platform and
// re-derivable outside this library.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1): top 53 bits scaled by 2^-53, exact in double.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform on [-1, 1).
  double symmetric() { return uniform(-1.0, 1.0); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fistalab
