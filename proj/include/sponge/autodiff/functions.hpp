#pragma once

#include <algorithm>
#include <cmath>

// Scalar nonlinearities shared by the tape and the graph-free evaluation
// paths. Both must call these exact functions so they agree bit for bit.
namespace sponge::fn {

inline constexpr double kProbabilityFloor = 1e-7;
inline constexpr double kProbabilityCeiling = 1.0 - 1e-7;

inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); }

inline double clamp_probability(double p) {
  return std::clamp(p, kProbabilityFloor, kProbabilityCeiling);
}

// Binary cross entropy of prediction p against target y, with p clamped away
// from {0, 1}.
inline double bce(double p, double y) {
  const double q = clamp_probability(p);
  return -(y * std::log(q) + (1.0 - y) * std::log(1.0 - q));
}

// d bce / d p. Zero where the clamp is active.
inline double bce_derivative(double p, double y) {
  if (p < kProbabilityFloor || p > kProbabilityCeiling) return 0.0;
  return -y / p + (1.0 - y) / (1.0 - p);
}

}  // namespace sponge::fn
