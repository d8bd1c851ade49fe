#include <algorithm>
#include <cmath>

#include "kernel_table.hpp"

namespace sponge::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double total = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double sum_squares_scalar(const double* a, std::size_t n) { return dot_scalar(a, a, n); }

double max_abs_scalar(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void tanh_backward_scalar(const double* y, const double* g, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += g[i] * (1.0 - y[i] * y[i]);
}

void sigmoid_backward_scalar(const double* y, const double* g, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += (g[i] * y[i]) * (1.0 - y[i]);
}

void clamp_scalar(double* x, double bound, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::min(std::max(x[i], -bound), bound);
}

void scale_scalar(double* x, double factor, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] * factor;
}

void sign_step_scalar(double* x, const double* g, double step, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (g[i] > 0.0) {
      x[i] = x[i] - step;
    } else if (g[i] < 0.0) {
      x[i] = x[i] + step;
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static constexpr KernelTable table{
      dot_scalar,         sum_squares_scalar,      max_abs_scalar, axpy_scalar,
      add_scalar,         tanh_backward_scalar,    sigmoid_backward_scalar,
      clamp_scalar,       scale_scalar,            sign_step_scalar,
  };
  return table;
}

}  // namespace sponge::simd::detail
