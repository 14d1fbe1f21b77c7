#pragma once

// Deterministic random streams. All randomness derives from one root seed:
// a stream is std::mt19937_64 seeded with SplitMix64(root ^ FNV-1a(label) ^
// mix(index)). Variates are produced by hand from raw 64-bit output so
// results do not depend on the standard library's distribution classes.

#include <cstdint>
#include <random>
#include <string_view>

namespace bisons::rng {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(std::string_view label);
std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t index = 0);

std::mt19937_64 stream(std::uint64_t root, std::string_view label,
                       std::uint64_t index = 0);

/// Uniform on [0, 1) with 53 random bits.
double uniform01(std::mt19937_64& g);
/// Uniform on (0, 1].
double uniform01_open_low(std::mt19937_64& g);
double exponential(std::mt19937_64& g);
double standard_normal(std::mt19937_64& g);
bool bernoulli(std::mt19937_64& g, double p);

}  // namespace bisons::rng
