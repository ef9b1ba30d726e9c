#pragma once

// Test-only helpers and independent oracles.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

#include "aoi/analytic.hpp"

namespace aoi::test {

inline std::int64_t ulp_distance(double a, double b) {
  if (a == b) return 0;
  std::int64_t ia;
  std::int64_t ib;
  std::memcpy(&ia, &a, sizeof a);
  std::memcpy(&ib, &b, sizeof b);
  if (ia < 0) ia = std::numeric_limits<std::int64_t>::min() - ia;
  if (ib < 0) ib = std::numeric_limits<std::int64_t>::min() - ib;
  return ia > ib ? ia - ib : ib - ia;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

/// Fully expanded closed form of the at-will type-I age, written out term by
/// term from the order-statistic moments. Independent of the renewal kernel.
inline double expanded_atwill_age_I(const Scenario& s) {
  const HarmonicCache hc(s.n);
  const double n = static_cast<double>(s.n);
  const double k1 = static_cast<double>(s.k1);
  const double p1 = s.mix.p1();
  const double p2 = s.mix.p2();
  const double a = os_mean(hc, s.delay_I, s.k1, s.n);
  const double a2 = os_second_moment(hc, s.delay_I, s.k1, s.n);
  const double b = os_mean(hc, s.delay_II, s.k2, s.n);
  const double b2 = os_second_moment(hc, s.delay_II, s.k2, s.n);
  double first = 0.0;
  for (std::int64_t i = 1; i <= s.k1; ++i) first += os_mean(hc, s.delay_I, i, s.n);
  first /= k1;
  const double mix = p1 * a + p2 * b;
  return first + (p1 * a2 + p2 * b2) / (2.0 * p1 * a + 2.0 * p2 * b) +
         (p2 * p2 * n * b * b + p1 * p2 * (2.0 * n - k1) * a * b) / (p1 * k1 * mix) +
         (p1 * p1 * (n - k1) * a * a) / (p1 * k1 * mix);
}

}  // namespace aoi::test
