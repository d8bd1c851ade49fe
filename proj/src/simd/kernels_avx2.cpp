// Built with -mavx2 only (no -mfma): multiplies and adds stay separate so the
// lane arithmetic matches the scalar reference exactly.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "kernel_table.hpp"

namespace sponge::simd::detail {
namespace {

inline double reduce_lanes(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double total = reduce_lanes(acc);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double sum_squares_avx2(const double* a, std::size_t n) { return dot_avx2(a, a, n); }

double max_abs_avx2(const double* a, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(a + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double result = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) result = std::max(result, std::fabs(a[i]));
  return result;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void add_avx2(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void tanh_backward_avx2(const double* y, const double* g, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d d = _mm256_mul_pd(_mm256_loadu_pd(g + i), _mm256_sub_pd(one, _mm256_mul_pd(vy, vy)));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), d));
  }
  for (; i < n; ++i) out[i] += g[i] * (1.0 - y[i] * y[i]);
}

void sigmoid_backward_avx2(const double* y, const double* g, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    __m256d d = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(g + i), vy), _mm256_sub_pd(one, vy));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), d));
  }
  for (; i < n; ++i) out[i] += (g[i] * y[i]) * (1.0 - y[i]);
}

void clamp_avx2(double* x, double bound, std::size_t n) {
  const __m256d hi = _mm256_set1_pd(bound);
  const __m256d lo = _mm256_set1_pd(-bound);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_min_pd(_mm256_max_pd(_mm256_loadu_pd(x + i), lo), hi));
  }
  for (; i < n; ++i) x[i] = std::min(std::max(x[i], -bound), bound);
}

void scale_avx2(double* x, double factor, std::size_t n) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), f));
  }
  for (; i < n; ++i) x[i] = x[i] * factor;
}

void sign_step_avx2(double* x, const double* g, double step, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d pos_step = _mm256_set1_pd(step);
  const __m256d neg_step = _mm256_set1_pd(-step);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vg = _mm256_loadu_pd(g + i);
    __m256d delta = _mm256_or_pd(_mm256_and_pd(_mm256_cmp_pd(vg, zero, _CMP_GT_OQ), pos_step),
                                 _mm256_and_pd(_mm256_cmp_pd(vg, zero, _CMP_LT_OQ), neg_step));
    _mm256_storeu_pd(x + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), delta));
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

const KernelTable& avx2_table() {
  static constexpr KernelTable table{
      dot_avx2,   sum_squares_avx2,   max_abs_avx2,          axpy_avx2,  add_avx2,
      tanh_backward_avx2, sigmoid_backward_avx2, clamp_avx2, scale_avx2, sign_step_avx2,
  };
  return table;
}

}  // namespace sponge::simd::detail
