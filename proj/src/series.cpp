#include "cylflow/series.hpp"

#include <cmath>
#include <numbers>

namespace cylflow {

namespace {
constexpr Real kPi = std::numbers::pi_v<Real>;
}

Real TrigSeries::value(Real phi) const {
  Real f = constant;
  for (const auto& [k, a] : cosine) f += a * std::cos(k * phi);
  for (const auto& [k, b] : sine) f += b * std::sin(k * phi);
  return f;
}

Real TrigSeries::deriv(Real phi) const {
  Real f = 0.0;
  for (const auto& [k, a] : cosine) f -= a * k * std::sin(k * phi);
  for (const auto& [k, b] : sine) f += b * k * std::cos(k * phi);
  return f;
}

Real TrigSeries::deriv2(Real phi) const {
  Real f = 0.0;
  for (const auto& [k, a] : cosine) f -= a * k * k * std::cos(k * phi);
  for (const auto& [k, b] : sine) f -= b * k * k * std::sin(k * phi);
  return f;
}

bool TrigSeries::is_constant() const { return cosine.empty() && sine.empty(); }

std::pair<Real, Real> TrigSeries::sampled_range(int count) const {
  Real lo = value(0.0), hi = lo;
  const Real step = 2.0 * kPi / count;
  for (int i = 1; i < count; ++i) {
    const Real f = value(i * step);
    lo = std::min(lo, f);
    hi = std::max(hi, f);
  }
  return {lo, hi};
}

}  // namespace cylflow
