#pragma once

#include <cstdint>
#include <random>

namespace cas {

using Rng = std::mt19937_64;

/// Independent random streams derived from one root seed.
enum class Stream : std::uint32_t { Encounter = 1, Pilot = 2, Belief = 3, Placement = 4 };

/// Stream for one worker item: same (root, stream, index) always yields the same sequence.
inline Rng make_stream(std::uint64_t root_seed, Stream stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// Uniform draw in [0, 1).
inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace cas
