// Deterministic RNG substream derivation.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace svo::rng {

/**
 * @brief Derive an independent mt19937_64 stream from a base seed and a tag
 *        sequence.
 *
 * Streams for (seed, tags...) are reproducible across runs and across thread
 * counts: the engine state depends only on the arguments, never on which
 * thread performs the draw. Callers tag replicate indices, array indices and
 * similar coordinates so that parallel schedules cannot reorder draws.
 */
inline std::mt19937_64 substream(std::uint64_t seed,
                                 std::initializer_list<std::uint32_t> tags) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + tags.size());
    words.push_back(static_cast<std::uint32_t>(seed & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(seed >> 32));
    words.insert(words.end(), tags.begin(), tags.end());
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

inline std::mt19937_64 substream(std::uint64_t seed) { return substream(seed, {}); }

}  // namespace svo::rng
