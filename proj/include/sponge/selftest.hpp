#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sponge {

inline constexpr double kGradcheckTolerance = 1e-4;
inline constexpr double kGradcheckStep = 1e-5;
inline constexpr int kRandomGraphCount = 100;

struct GradcheckEntry {
  std::string name;
  std::size_t checks = 0;
  double max_relative_error = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckEntry> entries;
  double max_relative_error = 0.0;
  bool passed() const { return max_relative_error <= kGradcheckTolerance; }
};

// Tape gradients against central differences: seeded random 3-layer graphs
// over every primitive, then speaker and per-position text gradients of both
// surrogate victims.
GradcheckReport run_gradcheck_suite(std::uint64_t seed);

std::string format_gradcheck(const GradcheckReport& report);

}  // namespace sponge
