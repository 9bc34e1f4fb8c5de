#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qnc {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derive a child seed from a parent seed and a path of integer labels.
/// Every label is folded in order, so (s, {a, b}) and (s, {b, a}) differ.
inline std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(parent);
    for (auto label : path) h = mix64(h ^ mix64(label + 0x632be59bd9b4e019ULL));
    return h;
}

// Stream labels used with derive_seed.
namespace stream {
inline constexpr std::uint64_t kBeta = 1;
inline constexpr std::uint64_t kAlpha = 2;
inline constexpr std::uint64_t kSupport = 3;
inline constexpr std::uint64_t kPerturbation = 4;
inline constexpr std::uint64_t kTransform = 5;
}  // namespace stream

}  // namespace qnc
