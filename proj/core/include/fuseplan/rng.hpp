#pragma once

#include <cstdint>
#include <random>

namespace fuseplan {

/// splitmix64 finalizer; used to derive independent rng streams from
/// (seed, generation, index) tuples so results never depend on evaluation
/// order.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c = 0) {
    return splitmix64(splitmix64(splitmix64(a) ^ b) ^ c);
}

/// Uniform draw in [0, n). Modulo on the raw 64-bit stream; bias is
/// negligible for the small n used here and keeps draws portable across
/// standard library implementations.
inline std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
    return n <= 1 ? 0 : static_cast<std::size_t>(rng() % n);
}

}  // namespace fuseplan
