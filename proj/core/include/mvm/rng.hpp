#pragma once

#include <cstdint>
#include <random>

namespace mvm {

// Random number contract used across the simulation code:
//   * the generator is std::mt19937_64,
//   * run seeds are 64-bit integers supplied by the caller,
//   * each Monte-Carlo path draws from its own stream, seeded by
//     path_seed(run_seed, path_index) below.
// Results therefore depend only on (seed, path count, step count) and never
// on how paths are scheduled across threads.

/// One SplitMix64 step. Advances `state` and returns the next output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of the stream that drives path `index` in a run seeded with `seed`.
inline std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed;
    std::uint64_t a = splitmix64(state);
    state = a ^ (index + 0x9E3779B97F4A7C15ULL * (index + 1));
    return splitmix64(state);
}

inline std::mt19937_64 make_path_generator(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(path_seed(seed, index));
}

} // namespace mvm
