#pragma once

#include <cstdint>
#include <random>

namespace ndc {

// Stable seed mixing for deriving independent streams from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 1));
}

// Poisson sampling by multiplicative composition; large rates are split into
// chunks so the Knuth product loop never underflows.
long poisson_draw(double lambda, std::mt19937_64& rng);

}  // namespace ndc
