#pragma once

#include <span>
#include <vector>

namespace sponge {

struct KdeCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 1.0;
};

inline constexpr std::size_t kDefaultGridPoints = 512;

// 0.9 * min(sd, IQR / 1.34) * n^(-1/5) with the sample sd (n - 1) and
// linearly interpolated quartiles. Falls back to 1.0 for n == 1 or zero spread.
double silverman_bandwidth(std::span<const double> values);

// Quantile with linear interpolation between order statistics (q in [0, 1]).
double quantile(std::vector<double> values, double q);

// density(x) = 1 / (n h) * sum_i phi((x - v_i) / h)
KdeCurve gaussian_kde(std::span<const double> values, std::span<const double> grid, double h);

// Uniform grid over [min - 4h, max + 4h].
std::vector<double> default_grid(std::span<const double> values, double h,
                                 std::size_t points = kDefaultGridPoints);

// Silverman bandwidth on the default grid.
KdeCurve default_kde(std::span<const double> values);

double trapezoid(std::span<const double> x, std::span<const double> y);

}  // namespace sponge
