// AArch64 Advanced SIMD variant. Two float64x2 registers model the four
// reduction lanes of the scalar reference; vmulq/vaddq are kept separate
// (never vfmaq) so results match it exactly.
#include <arm_neon.h>

#include <algorithm>
#include <cmath>

#include "kernel_table.hpp"

namespace sponge::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double total = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
                 (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double sum_squares_neon(const double* a, std::size_t n) { return dot_neon(a, a, n); }

double max_abs_neon(const double* a, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(a + i)));
  double result = std::max(vgetq_lane_f64(m, 0), vgetq_lane_f64(m, 1));
  for (; i < n; ++i) result = std::max(result, std::fabs(a[i]));
  return result;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(va, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void add_neon(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void tanh_backward_neon(const double* y, const double* g, double* out, std::size_t n) {
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    float64x2_t d = vmulq_f64(vld1q_f64(g + i), vsubq_f64(one, vmulq_f64(vy, vy)));
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(out + i), d));
  }
  for (; i < n; ++i) out[i] += g[i] * (1.0 - y[i] * y[i]);
}

void sigmoid_backward_neon(const double* y, const double* g, double* out, std::size_t n) {
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    float64x2_t d = vmulq_f64(vmulq_f64(vld1q_f64(g + i), vy), vsubq_f64(one, vy));
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(out + i), d));
  }
  for (; i < n; ++i) out[i] += (g[i] * y[i]) * (1.0 - y[i]);
}

void clamp_neon(double* x, double bound, std::size_t n) {
  const float64x2_t hi = vdupq_n_f64(bound);
  const float64x2_t lo = vdupq_n_f64(-bound);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vminq_f64(vmaxq_f64(vld1q_f64(x + i), lo), hi));
  for (; i < n; ++i) x[i] = std::min(std::max(x[i], -bound), bound);
}

void scale_neon(double* x, double factor, std::size_t n) {
  const float64x2_t f = vdupq_n_f64(factor);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), f));
  for (; i < n; ++i) x[i] = x[i] * factor;
}

void sign_step_neon(double* x, const double* g, double step, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t pos = vdupq_n_f64(step);
  const float64x2_t neg = vdupq_n_f64(-step);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vg = vld1q_f64(g + i);
    float64x2_t delta = vbslq_f64(vcgtq_f64(vg, zero), pos, vbslq_f64(vcltq_f64(vg, zero), neg, zero));
    vst1q_f64(x + i, vsubq_f64(vld1q_f64(x + i), delta));
  }
  for (; i < n; ++i) {
    if (g[i] > 0.0) {
      x[i] = x[i] - step;
    } else if (g[i] < 0.0) {
      x[i] = x[i] + step;
    }
  }
}

}  // namespace

const KernelTable& neon_table() {
  static constexpr KernelTable table{
      dot_neon,   sum_squares_neon,   max_abs_neon,          axpy_neon,  add_neon,
      tanh_backward_neon, sigmoid_backward_neon, clamp_neon, scale_neon, sign_step_neon,
  };
  return table;
}

}  // namespace sponge::simd::detail
