#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace bhjb {

/// Counter-based pseudo-random generator: a SplitMix64 output function applied
/// to key + counter * golden-gamma. Streams derived from distinct key tuples
/// are independent, so every (seed, episode, round) gets its own generator and
/// episode results do not depend on scheduling order.
///
/// Samplers are hand-rolled (Box-Muller, Marsaglia-Tsang) so that a given key
/// produces identical draws on every platform; <random> distributions are
/// implementation-defined and would break byte-identical reruns.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Fold a tuple of words into one stream key.
  static std::uint64_t derive_key(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::uint64_t w : words) h = mix(h ^ mix(w));
    return h;
  }

  std::uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ull;
    return mix(key_ ^ counter_);
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log argument.
  double next_positive_double() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (uncached; two uniforms per draw).
  double next_normal() {
    const double u1 = next_positive_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 boosted through shape+1.
  double next_gamma(double shape) {
    if (shape < 1.0) {
      const double u = next_positive_double();
      return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = next_normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = next_positive_double();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double next_beta(double a, double b) {
    const double x = next_gamma(a);
    const double y = next_gamma(b);
    return x / (x + y);
  }

  /// Sample an index from non-negative weights summing to ~1.
  int next_categorical(const double* weights, int n) {
    double u = next_double();
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      acc += weights[k];
      if (u < acc) return k;
    }
    return n - 1;
  }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace bhjb
