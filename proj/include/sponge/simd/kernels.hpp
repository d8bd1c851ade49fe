#pragma once

// Dense double-precision inner loops used by the autodiff tape, the victim
// fast paths and the attack projections.
//
// Every backend reproduces the scalar reference bit for bit. Reductions use
// four interleaved partial sums combined as (s0 + s1) + (s2 + s3), followed by
// a sequential tail; elementwise kernels have no ordering freedom at all. The
// build disables floating-point contraction so no backend fuses a multiply
// into an add.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace sponge::simd {

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend backend);

// Backends compiled into this binary that the running CPU can execute.
std::vector<Backend> available_backends();

Backend active_backend();

// Throws ConfigError when the backend is not available on this machine.
void set_backend(Backend backend);

// Sum of a[i] * b[i].
double dot(std::span<const double> a, std::span<const double> b);

// Sum of a[i] * a[i].
double sum_squares(std::span<const double> a);

// Max of |a[i]|; 0 for an empty span.
double max_abs(std::span<const double> a);

// y = W x for a row-major rows x cols matrix.
void matvec(std::span<const double> matrix, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);

// out += W^T g, accumulated row by row.
void matvec_transposed_accumulate(std::span<const double> matrix, std::size_t rows,
                                  std::size_t cols, std::span<const double> g,
                                  std::span<double> out);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// out = a + b
void add(std::span<const double> a, std::span<const double> b, std::span<double> out);

// out += g * (1 - y * y), the tanh derivative expressed through its output.
void tanh_backward_accumulate(std::span<const double> y, std::span<const double> g,
                              std::span<double> out);

// out += g * y * (1 - y), the logistic derivative expressed through its output.
void sigmoid_backward_accumulate(std::span<const double> y, std::span<const double> g,
                                 std::span<double> out);

// x[i] = min(max(x[i], -bound), bound)
void clamp_symmetric(std::span<double> x, double bound);

// x[i] = x[i] * factor
void scale_in_place(std::span<double> x, double factor);

// x[i] = x[i] - step * sign(g[i]) with sign(0) = 0.
void sign_step(std::span<double> x, std::span<const double> g, double step);

}  // namespace sponge::simd
