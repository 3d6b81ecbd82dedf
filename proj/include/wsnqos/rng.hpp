// Seeded random source with portable derived draws.
//
// std::uniform_*_distribution results differ across standard libraries, so
// draws are built directly from the raw mt19937_64 output.

#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace wsnqos {

class Rng
{
public:
  explicit Rng (std::uint64_t seed) : engine_ (seed) {}

  std::uint64_t bits () { return engine_ (); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform () { return static_cast<double> (engine_ () >> 11) * 0x1.0p-53; }

  double uniform (double lo, double hi) { return lo + (hi - lo) * uniform (); }

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below (std::uint64_t n)
  {
    // Rejection keeps the draw unbiased.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do
      x = engine_ ();
    while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle (std::vector<T>& v)
  {
    for (std::size_t i = v.size (); i > 1; --i)
      std::swap (v[i - 1], v[below (i)]);
  }

private:
  std::mt19937_64 engine_;
};

/// Deterministic sub-seed for stream k of a parent seed (splitmix64 mix).
inline std::uint64_t
derive_seed (std::uint64_t seed, std::uint64_t k)
{
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace wsnqos
