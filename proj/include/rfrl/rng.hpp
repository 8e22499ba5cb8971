#pragma once

#include <cstdint>
#include <random>

namespace rfrl {

// splitmix64 step; used only to spread seed material before handing it
// to the mersenne twister.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Independent random stream for occupant `stream_id` under a master seed.
// Stream 0 belongs to the agent, streams >= 1 to entities in scenario
// order, so adding or removing one occupant never perturbs the others.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t state = master_seed;
    splitmix64(state);
    state ^= 0x517cc1b727220a95ULL * (stream_id + 1);
    return std::mt19937_64(splitmix64(state));
}

// Uniform double in [0, 1) using the top 53 bits of one generator draw.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n); rejection sampling keeps the draw unbiased.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = rng();
    while (v >= limit) {
        v = rng();
    }
    return v % n;
}

}  // namespace rfrl
