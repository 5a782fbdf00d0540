#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace covtweet::rng {

using Engine = std::mt19937_64;

// splitmix64 finalizer.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent engine for stream `stream` of master seed `seed`.
inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  return Engine(mix(mix(seed) ^ mix(stream + 1)));
}

// Uniform in [0, 1) with 53-bit resolution. std::uniform_real_distribution is
// implementation-defined, so frozen expected values in tests go through this.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n); n > 0. The modulo bias is irrelevant for the
// sizes used here.
inline std::uint64_t below(Engine& eng, std::uint64_t n) { return eng() % n; }

// Box-Muller, one variate per call (the sine twin is discarded so draws do
// not carry hidden state).
inline double normal(Engine& eng, double mean = 0.0, double stddev = 1.0) {
  double u1 = uniform01(eng);
  double u2 = uniform01(eng);
  while (u1 <= 0.0) u1 = uniform01(eng);
  const double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(6.283185307179586476925286766559 * u2);
  return mean + stddev * z;
}

// Fisher-Yates with explicit draws; portable unlike std::shuffle.
template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[below(eng, i)]);
  }
}

}  // namespace covtweet::rng
