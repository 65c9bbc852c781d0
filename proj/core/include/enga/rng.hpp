#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace enga {

// Deterministic, platform-independent random number generation.
//
// The standard <random> distributions are implementation-defined, which
// breaks byte-identical outputs across standard libraries. Everything here
// is fully specified: a splitmix64 stream plus explicit samplers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi] inclusive.
  std::uint64_t next_int(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    return lo + next_u64() % span;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Standard normal via Box-Muller; one variate per pair of uniforms.
  double normal() {
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Zero-centered Laplace with scale b, via inverse CDF.
  double laplace(double b) {
    const double u = next_double() - 0.5;
    const double a = std::abs(u);
    const double mag = -b * std::log(1.0 - 2.0 * (a < 0.5 ? a : 0.49999999999999994));
    return u < 0.0 ? -mag : mag;
  }

  // Poisson-distributed count. Exact (Knuth) below lambda = 30, rounded
  // clamped normal above; the crossover keeps large intensities O(1).
  double poisson(double lambda) {
    if (lambda <= 0.0) return 0.0;
    if (lambda < 30.0) {
      const double limit = std::exp(-lambda);
      double prod = next_double();
      double k = 0.0;
      while (prod > limit) {
        prod *= next_double();
        k += 1.0;
      }
      return k;
    }
    const double draw = std::round(lambda + std::sqrt(lambda) * normal());
    return draw < 0.0 ? 0.0 : draw;
  }

  double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

 private:
  std::uint64_t state_;
};

// 64-bit FNV-1a, used for stable stream identifiers and config hashes.
constexpr std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives an independent child seed from a master seed and a stream id.
// Sub-streams (per month, per URL, per bootstrap replicate) draw from
// seeds produced here, so work units can be reordered or parallelized
// without changing any drawn value.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  Rng mix(master ^ (stream * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL));
  return mix.next_u64();
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name) {
  return derive_seed(master, fnv1a(name));
}

}  // namespace enga
