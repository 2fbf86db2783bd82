#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace persearch {

// splitmix64 step, used to derive decorrelated stream seeds from a master
// seed. Also usable as a counter-based hash for per-entity streams.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// mt19937_64 with hand-rolled variate transforms. The C++ standard pins down
// the engine bit stream but not the distribution adaptors, so the transforms
// are spelled out here to keep runs reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  // First-arrival time of a rate `rate` Poisson process inside a window of
  // length `len`, conditioned on at least one arrival in the window.
  double truncated_exponential(double rate, double len) {
    const double p_any = -std::expm1(-rate * len);
    return -std::log1p(-uniform() * p_any) / rate;
  }

  // Knuth's product-of-uniforms method; large means are split so the
  // exp(-mean) limit never underflows.
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 30.0) {
      const double half = mean / 2.0;
      return poisson(half) + poisson(mean - half);
    }
    const double limit = std::exp(-mean);
    int count = -1;
    double prod = 1.0;
    do {
      prod *= uniform();
      ++count;
    } while (prod > limit);
    return count;
  }

  // Unbiased integer on [0, bound) by rejection.
  std::uint64_t integer(std::uint64_t bound) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % bound;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace persearch
