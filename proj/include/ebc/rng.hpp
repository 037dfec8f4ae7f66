#ifndef EBC_RNG_HPP
#define EBC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace ebc {

using Rng = std::mt19937_64;

// splitmix64 step; used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic substream seed for (master, stream).  Replicates, chunks and
// criteria all derive their generators through this, so scheduling order
// never changes the realized randomness.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream * 0xD1B54A32D192ED03ULL + 1));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
  return Rng(substream_seed(master, stream));
}

// Uniform on (0,1]; never returns 0 so logs and inverse powers stay finite.
inline double uniform01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1p-53);
}

inline double exponential(Rng& rng, double rate) {
  return -std::log(uniform01(rng)) / rate;
}

// Pareto with tail P(U > u) = (floor_/u)^alpha, u >= floor_.
inline double pareto(Rng& rng, double alpha, double floor_) {
  return floor_ * std::pow(uniform01(rng), -1.0 / alpha);
}

// Pareto conditioned to [lo, hi): inversion of the truncated tail.
inline double pareto_band(Rng& rng, double alpha, double lo, double hi) {
  const double a = std::pow(lo, -alpha);
  const double b = std::pow(hi, -alpha);
  const double u = uniform01(rng);
  return std::pow(b + u * (a - b), -1.0 / alpha);
}

inline std::int64_t uniform_index(Rng& rng, std::int64_t n) {
  return static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n));
}

inline std::int64_t poisson(Rng& rng, double mean) {
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng);
}

}  // namespace ebc

#endif  // EBC_RNG_HPP
