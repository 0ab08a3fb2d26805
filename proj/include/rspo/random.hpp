#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace rspo {

// std::mt19937_64 is fully specified by the standard, but the std::
// distributions are not; everything here is built on raw engine output so
// sequences are identical across standard libraries.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent engine for one (seed, stream) pair.
inline Engine make_stream(std::uint64_t seed, std::uint64_t stream) {
  return Engine(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF draw from `probs` (assumed to sum to one).
inline int sample_categorical(Engine& eng, std::span<const double> probs) {
  const double u = uniform01(eng);
  double cum = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) last_positive = static_cast<int>(i);
    cum += probs[i];
    if (u < cum) return static_cast<int>(i);
  }
  return last_positive;  // u landed in the rounding gap above the total
}

}  // namespace rspo
