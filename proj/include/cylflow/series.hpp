#pragma once

#include <utility>
#include <vector>

#include "cylflow/types.hpp"

namespace cylflow {

// Truncated trigonometric series f(phi) = c0 + sum_k a_k cos(k phi) + b_k sin(k phi).
// Used for boundary radius and contact-angle profiles; 2*pi periodic.
struct TrigSeries {
  Real constant = 0.0;
  std::vector<std::pair<int, Real>> cosine;  // (harmonic k >= 1, coefficient)
  std::vector<std::pair<int, Real>> sine;

  Real value(Real phi) const;
  Real deriv(Real phi) const;
  Real deriv2(Real phi) const;
  bool is_constant() const;

  // Min/max of value() over a fine uniform sampling (count samples).
  std::pair<Real, Real> sampled_range(int count) const;
};

}  // namespace cylflow
