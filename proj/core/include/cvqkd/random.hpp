#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace cvqkd {

// All randomness in the toolkit flows through gaussian_stream/derive_seed so
// that a whole sweep is a pure function of the master seed. The generator is
// pinned: xoshiro256++ seeded through splitmix64, normal variates by
// Box-Muller. Do not swap either without bumping the results format, bit-exact
// regression tests depend on them.

/// xoshiro256++ by Blackman & Vigna, state expanded from a 64-bit seed with
/// splitmix64.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed);
    std::uint64_t next();
    /// Uniform double in [0, 1) with 53-bit resolution.
    double next_double();

  private:
    std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t fnv1a64(std::string_view bytes);

/// Counter/label seed derivation: each (repetition, stream label) pair gets an
/// independent seed, so repetitions can run in parallel with results identical
/// to serial execution.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t repetition_index,
                          std::string_view stream_label);

/// n i.i.d. draws from N(0, variance). Identical (seed, n, variance) gives
/// bit-identical output. variance == 0 returns exact zeros.
std::vector<double> gaussian_stream(std::uint64_t seed, std::size_t n, double variance);

}  // namespace cvqkd
