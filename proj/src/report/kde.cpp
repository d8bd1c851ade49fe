#include "sponge/report/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sponge/error.hpp"

namespace sponge {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw MetricError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double silverman_bandwidth(std::span<const double> values) {
  if (values.empty()) throw MetricError("bandwidth of an empty sample");
  const std::size_t n = values.size();
  if (n == 1) return 1.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const std::vector<double> copy(values.begin(), values.end());
  const double iqr = quantile(copy, 0.75) - quantile(copy, 0.25);
  const double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) return 1.0;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

KdeCurve gaussian_kde(std::span<const double> values, std::span<const double> grid, double h) {
  if (values.empty()) throw MetricError("density estimate of an empty sample");
  if (!(h > 0.0)) throw MetricError("bandwidth must be positive");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw MetricError("density grid must be strictly ascending");
  }
  const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  KdeCurve curve;
  curve.bandwidth = h;
  curve.grid.assign(grid.begin(), grid.end());
  curve.density.reserve(grid.size());
  for (double x : grid) {
    double acc = 0.0;
    for (double v : values) {
      const double z = (x - v) / h;
      acc += std::exp(-0.5 * z * z);
    }
    curve.density.push_back(norm * acc);
  }
  return curve;
}

std::vector<double> default_grid(std::span<const double> values, double h, std::size_t points) {
  if (values.empty()) throw MetricError("density grid of an empty sample");
  if (points < 2) throw MetricError("density grid needs at least two points");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn - 4.0 * h;
  const double hi = *mx + 4.0 * h;
  std::vector<double> grid(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = lo + step * static_cast<double>(i);
  grid.back() = hi;
  return grid;
}

KdeCurve default_kde(std::span<const double> values) {
  const double h = silverman_bandwidth(values);
  return gaussian_kde(values, default_grid(values, h), h);
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw MetricError("trapezoid needs matching x and y");
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) area += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return area;
}

}  // namespace sponge
