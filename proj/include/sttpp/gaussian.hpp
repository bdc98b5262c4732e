#pragma once

#include <cmath>

namespace sttpp {

inline constexpr double kInvSqrt2Pi = 0.3989422804014327;
inline constexpr double kInvSqrt2 = 0.7071067811865476;

inline double norm_pdf(double t) {
  return kInvSqrt2Pi * std::exp(-0.5 * t * t);
}

inline double norm_cdf(double t) { return 0.5 * std::erfc(-t * kInvSqrt2); }

// upper tail 1 - Phi(t), computed without cancellation
inline double norm_sf(double t) { return 0.5 * std::erfc(t * kInvSqrt2); }

// Inverse Mills ratio phi(t) / (1 - Phi(t)); the mean of a standard normal
// truncated below at t. Direct evaluation is exact while erfc stays away
// from underflow; past that we switch to the Mills asymptotic series,
// which at t = 20 is already accurate to ~1e-10 relative.
inline double hazard(double t) {
  if (t < 20.0) {
    return norm_pdf(t) / norm_sf(t);
  }
  const double r2 = 1.0 / (t * t);
  const double mills = 1.0 - r2 * (1.0 - r2 * (3.0 - r2 * (15.0 - r2 * 105.0)));
  return t / mills;
}

inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace sttpp
