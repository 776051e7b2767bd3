#ifndef HOPKIT_RAND_HPP
#define HOPKIT_RAND_HPP

#include <cstdint>

namespace hopkit::rnd {

// Counter-based hashing instead of a shared RNG stream: every random decision
// is a pure function of (seed, purpose tag, a, b), so sampling outcomes do not
// depend on iteration order or on how work is split across workers.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t tag,
                            std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = splitmix64(seed ^ 0x2545f4914f6cdd1dULL);
    h = splitmix64(h ^ tag);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    return h;
}

// Uniform in [0,1), 53-bit resolution.
constexpr double unit(std::uint64_t seed, std::uint64_t tag,
                      std::uint64_t a = 0, std::uint64_t b = 0) {
    return static_cast<double>(mix(seed, tag, a, b) >> 11) * 0x1p-53;
}

// Uniform integer in [0, n). n must be positive.
constexpr std::uint64_t below(std::uint64_t n, std::uint64_t seed, std::uint64_t tag,
                              std::uint64_t a = 0, std::uint64_t b = 0) {
    return mix(seed, tag, a, b) % n;
}

// Purpose tags. Arbitrary distinct constants; never reuse one for two decisions.
namespace tag {
constexpr std::uint64_t gen_weight     = 0x01;
constexpr std::uint64_t gnp_edge       = 0x02;
constexpr std::uint64_t tree_parent    = 0x03;
constexpr std::uint64_t level_promote  = 0x04;
constexpr std::uint64_t route_level    = 0x05;
constexpr std::uint64_t vprime_sample  = 0x06;
constexpr std::uint64_t bcast_start    = 0x07;
constexpr std::uint64_t tree_usample   = 0x08;
constexpr std::uint64_t pair_sample    = 0x09;
}  // namespace tag

}  // namespace hopkit::rnd

#endif
