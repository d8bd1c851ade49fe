#include <atomic>
#include <string>

#include "kernel_table.hpp"
#include "sponge/error.hpp"
#include "sponge/simd/kernels.hpp"

namespace sponge::simd {
namespace {

using detail::KernelTable;

bool cpu_supports(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(SPONGE_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::neon:
#if defined(SPONGE_HAVE_NEON_KERNELS)
      return true;  // Advanced SIMD is mandatory on AArch64.
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Backend backend) {
  switch (backend) {
#if defined(SPONGE_HAVE_AVX2_KERNELS)
    case Backend::avx2:
      return detail::avx2_table();
#endif
#if defined(SPONGE_HAVE_NEON_KERNELS)
    case Backend::neon:
      return detail::neon_table();
#endif
    default:
      return detail::scalar_table();
  }
}

Backend best_backend() {
  if (cpu_supports(Backend::avx2)) return Backend::avx2;
  if (cpu_supports(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

struct Active {
  std::atomic<Backend> backend;
  std::atomic<const KernelTable*> table;
  Active() : backend(best_backend()), table(&table_for(backend.load())) {}
};

Active& active() {
  static Active instance;
  return instance;
}

inline const KernelTable& kernels() { return *active().table.load(std::memory_order_relaxed); }

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": length mismatch " + std::to_string(a) + " vs " +
                     std::to_string(b));
  }
}

}  // namespace

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
    if (cpu_supports(b)) out.push_back(b);
  }
  return out;
}

Backend active_backend() { return active().backend.load(); }

void set_backend(Backend backend) {
  if (!cpu_supports(backend)) {
    throw ConfigError("SIMD backend '" + std::string(backend_name(backend)) +
                      "' is not available on this machine");
  }
  active().table.store(&table_for(backend));
  active().backend.store(backend);
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  return kernels().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) { return kernels().sum_squares(a.data(), a.size()); }

double max_abs(std::span<const double> a) { return kernels().max_abs(a.data(), a.size()); }

void matvec(std::span<const double> matrix, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  require_same_size(matrix.size(), rows * cols, "matvec matrix");
  require_same_size(x.size(), cols, "matvec input");
  require_same_size(y.size(), rows, "matvec output");
  const auto& k = kernels();
  for (std::size_t r = 0; r < rows; ++r) y[r] = k.dot(matrix.data() + r * cols, x.data(), cols);
}

void matvec_transposed_accumulate(std::span<const double> matrix, std::size_t rows,
                                  std::size_t cols, std::span<const double> g,
                                  std::span<double> out) {
  require_same_size(matrix.size(), rows * cols, "matvec_transposed matrix");
  require_same_size(g.size(), rows, "matvec_transposed gradient");
  require_same_size(out.size(), cols, "matvec_transposed output");
  const auto& k = kernels();
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] != 0.0) k.axpy(g[r], matrix.data() + r * cols, out.data(), cols);
  }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size(), "axpy");
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

void add(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  require_same_size(a.size(), b.size(), "add");
  require_same_size(a.size(), out.size(), "add output");
  kernels().add(a.data(), b.data(), out.data(), a.size());
}

void tanh_backward_accumulate(std::span<const double> y, std::span<const double> g,
                              std::span<double> out) {
  require_same_size(y.size(), g.size(), "tanh_backward");
  require_same_size(y.size(), out.size(), "tanh_backward output");
  kernels().tanh_backward(y.data(), g.data(), out.data(), y.size());
}

void sigmoid_backward_accumulate(std::span<const double> y, std::span<const double> g,
                                 std::span<double> out) {
  require_same_size(y.size(), g.size(), "sigmoid_backward");
  require_same_size(y.size(), out.size(), "sigmoid_backward output");
  kernels().sigmoid_backward(y.data(), g.data(), out.data(), y.size());
}

void clamp_symmetric(std::span<double> x, double bound) {
  kernels().clamp_symmetric(x.data(), bound, x.size());
}

void scale_in_place(std::span<double> x, double factor) {
  kernels().scale(x.data(), factor, x.size());
}

void sign_step(std::span<double> x, std::span<const double> g, double step) {
  require_same_size(x.size(), g.size(), "sign_step");
  kernels().sign_step(x.data(), g.data(), step, x.size());
}

}  // namespace sponge::simd
