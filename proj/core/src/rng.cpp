#include "bisons/rng.hpp"

#include <cmath>
#include <numbers>

namespace bisons::rng {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t index) {
  return splitmix64(splitmix64(root ^ fnv1a(label)) ^ splitmix64(index));
}

std::mt19937_64 stream(std::uint64_t root, std::string_view label,
                       std::uint64_t index) {
  return std::mt19937_64(derive_seed(root, label, index));
}

double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

double uniform01_open_low(std::mt19937_64& g) {
  return (static_cast<double>(g() >> 11) + 1.0) * 0x1.0p-53;
}

double exponential(std::mt19937_64& g) { return -std::log(uniform01_open_low(g)); }

double standard_normal(std::mt19937_64& g) {
  // Box-Muller, one variate per call.
  const double u1 = uniform01_open_low(g);
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool bernoulli(std::mt19937_64& g, double p) { return uniform01(g) < p; }

}  // namespace bisons::rng
