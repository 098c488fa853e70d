// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dppmix/errors.hpp"

namespace dppmix {

/// SplitMix64 finalizer. Used only to turn (master seed, stream id) into a
/// well-mixed engine seed; the engine itself is mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// One reproducible random stream. Streams are addressed by (master seed,
/// stream id), so replicate k always sees the same draws no matter how many
/// replicates run, in what order, or on which thread. All variate transforms
/// are written out here (not std::*_distribution) so that identical seeds give
/// bit-identical output on any standard library.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : gen_(splitmix64(splitmix64(master_seed) ^ splitmix64(stream_id ^ 0xD1B54A32D192ED03ULL))) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Standard normal via Box-Muller; caches the second variate.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Poisson count by exponential-product inversion. Means above 500 are
  /// split into chunks so the running product never underflows; the result
  /// stays exact in distribution.
  long poisson(double mean) {
    if (!(mean >= 0.0)) throw ValidationError("poisson: mean must be >= 0");
    long total = 0;
    while (mean > 500.0) {
      total += poisson_small(500.0);
      mean -= 500.0;
    }
    return total + poisson_small(mean);
  }

 private:
  long poisson_small(double mean) {
    const double limit = std::exp(-mean);
    double prod = 1.0;
    long k = 0;
    while (true) {
      prod *= uniform01();
      if (prod <= limit) return k;
      ++k;
    }
  }

  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace dppmix
