#ifndef KPP_RNG_HPP
#define KPP_RNG_HPP

#include <cstdint>

namespace kpp {

// Counter-based generator: the value at lattice index i is a pure function of
// (seed, stream, i), so shifting a field by j is exact re-indexing rather than
// stream replay.  SplitMix64 finalizer over a 128-bit-ish input mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t index_hash(std::uint64_t seed, std::uint64_t stream, long long index) {
    // two-round mix so that adjacent indices decorrelate
    std::uint64_t x = static_cast<std::uint64_t>(index) + 0x632be59bd9b4e019ULL;
    std::uint64_t h = mix64(seed ^ mix64(stream ^ 0x8c72e7d4b1a95f63ULL));
    return mix64(h ^ mix64(x + h));
}

// uniform double in [0,1) with 53 random bits
inline double uniform01(std::uint64_t seed, std::uint64_t stream, long long index) {
    return static_cast<double>(index_hash(seed, stream, index) >> 11) * 0x1.0p-53;
}

} // namespace kpp

#endif
