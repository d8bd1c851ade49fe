#pragma once

#include <cstddef>

namespace sponge::simd::detail {

// One backend's implementations. Pointers take raw (pointer, length) pairs so
// translation units built with different target flags share no inline code.
struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*tanh_backward)(const double* y, const double* g, double* out, std::size_t n);
  void (*sigmoid_backward)(const double* y, const double* g, double* out, std::size_t n);
  void (*clamp_symmetric)(double* x, double bound, std::size_t n);
  void (*scale)(double* x, double factor, std::size_t n);
  void (*sign_step)(double* x, const double* g, double step, std::size_t n);
};

const KernelTable& scalar_table();

#if defined(SPONGE_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table();
#endif

#if defined(SPONGE_HAVE_NEON_KERNELS)
const KernelTable& neon_table();
#endif

}  // namespace sponge::simd::detail
