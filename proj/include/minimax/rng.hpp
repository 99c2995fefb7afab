#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace minimax {

// Seed derivation for reproducible sweeps.
//
// Every random draw in the project flows through an Rng constructed from a
// 64-bit seed. Sub-seeds are derived from a master seed and a cell key
// (arbitrary tag string plus integer indices) by FNV-1a hashing followed by a
// splitmix64 finalizer. The derivation depends only on the key, never on
// execution order, so parallel sweeps reproduce serial results bit for bit.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                          std::uint64_t i0 = 0, std::uint64_t i1 = 0,
                          std::uint64_t i2 = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform on [0, 1), 53-bit mantissa
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // inclusive range
  long uniform_int(long lo, long hi);

  // standard normal via Box-Muller; two uniforms per call, no cached spare,
  // so the draw sequence is independent of interleaving with other methods
  double normal();

  double normal(double mean, double stddev) {
    return mean + stddev * normal();
  }

  // random sign, +1 or -1
  double sign() { return (gen_() & 1u) ? 1.0 : -1.0; }

  // child generator for a tagged subtask
  Rng split(std::string_view tag, std::uint64_t index = 0);

 private:
  std::mt19937_64 gen_;
};

}  // namespace minimax
