#pragma once

#include <cstdint>
#include <random>

#include "cylflow/geometry.hpp"

namespace cylflow {

// Seeded generator with an explicit bits-to-double mapping, so streams are
// reproducible across standard library implementations.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  Real uniform() { return (eng() >> 11) * 0x1.0p-53; }  // [0, 1)
  Real uniform(Real a, Real b) { return a + (b - a) * uniform(); }
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }
};

// Random low-frequency trigonometric field on the nodes: smooth, mean-free
// modes, amplitude-scaled; the workhorse behind randomized initial data.
Vector random_smooth_field(const DomainGeometry& geom, Rng& rng, Real amplitude,
                           int max_mode = 2, int terms = 4);

}  // namespace cylflow
