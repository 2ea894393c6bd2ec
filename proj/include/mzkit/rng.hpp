#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace mzkit {

/// Deterministic random source. Raw bits come from std::mt19937_64 (whose
/// stream is fixed by the standard); all conversions to doubles are done
/// explicitly here so that generated sequences are identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Derives an independent stream for substream `index` of `seed`
  /// (splitmix64 of the pair), used for parallel restarts.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller (explicit, portable).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 == 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double c = std::cos(2.0 * M_PI * u2), s = std::sin(2.0 * M_PI * u2);
    spare_ = r * s;
    has_spare_ = true;
    return r * c;
  }

  /// Uniform direction on the unit sphere in R^n.
  std::vector<double> unit_vector(int n) {
    std::vector<double> v(n);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int i = 0; i < n; ++i) {
        v[i] = normal();
        norm2 += v[i] * v[i];
      }
    } while (norm2 == 0.0);
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& x : v) x *= inv;
    return v;
  }

  /// Uniform point in the closed unit ball of R^n.
  std::vector<double> in_ball(int n) {
    auto v = unit_vector(n);
    double r = std::pow(uniform(), 1.0 / n);
    for (auto& x : v) x *= r;
    return v;
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mzkit
