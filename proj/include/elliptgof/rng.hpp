#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace elliptgof {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic stream seed from an ordered list of keys. Independent of
/// execution order, so replicate r always sees the same stream.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t k : keys) h = mix64(h ^ mix64(k));
    return h;
}

/// 64-bit FNV-1a.
constexpr std::uint64_t hash_string(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline Rng make_rng(std::initializer_list<std::uint64_t> keys) {
    return Rng(derive_seed(keys));
}

}  // namespace elliptgof
