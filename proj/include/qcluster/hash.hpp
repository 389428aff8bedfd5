#pragma once

#include <cstdint>

namespace qcluster {

// splitmix64 finalizer; a full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seeded key hash; distinct seeds give independent hash functions.
inline std::uint64_t hash_key(std::uint64_t key, std::uint64_t seed) {
    return mix64(key ^ mix64(seed));
}

}  // namespace qcluster
