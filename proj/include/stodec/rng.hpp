#pragma once

#include "stodec/types.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace stodec {

/**
 * Seeded Gaussian sampler with named substreams.
 *
 * A (seed, stream) pair fully determines the sequence: the mt19937_64 engine
 * is seeded with the (stream+1)-th output of a splitmix64 generator started
 * at `seed`.  Distinct streams therefore decorrelate even for adjacent seeds,
 * and consumers can draw from "their" stream without coordinating a shared
 * engine.  Normals come from the Box-Muller transform fed by 53-bit uniforms:
 *
 *   u1 = ((x >> 11) + 1) * 2^-53   in (0, 1]
 *   u2 = (x >> 11) * 2^-53         in [0, 1)
 *
 * so log(u1) is always finite.  The second variate of each pair is cached.
 */
class SubstreamRng {
 public:
  SubstreamRng(std::uint64_t seed, std::uint64_t stream)
      : engine_(derive_seed(seed, stream)) {}

  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform_unit_open() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform_unit_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi_v<double> * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Fills row by row, left to right.
  void fill_gaussian(Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) m(i, j) = gaussian();
  }

  void fill_gaussian(Vector& v) {
    for (Index i = 0; i < v.size(); ++i) v[i] = gaussian();
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace stodec
