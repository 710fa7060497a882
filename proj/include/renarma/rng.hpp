#pragma once

/// @file
/// Reproducible random streams.
///
/// Every stream is a std::mt19937_64 seeded through std::seed_seq with the
/// four 32-bit words (seed_lo, seed_hi, stream_lo, stream_hi). Both the engine
/// and seed_seq::generate are fully specified by the standard, so a
/// (seed, stream) pair yields the same draws on every conforming platform.
/// Chain i of a simulation uses stream i.

#include <cstdint>
#include <random>

namespace renarma {

class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace renarma
