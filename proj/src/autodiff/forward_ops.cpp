#include "sponge/autodiff/forward_ops.hpp"

#include <cmath>

#include "sponge/autodiff/functions.hpp"
#include "sponge/simd/kernels.hpp"

namespace sponge::forward {

Vec matvec(std::span<const double> matrix, std::size_t rows, std::size_t cols,
           std::span<const double> x) {
  Vec y(rows);
  simd::matvec(matrix, rows, cols, x, y);
  return y;
}

Vec add(std::span<const double> a, std::span<const double> b) {
  Vec out(a.size());
  simd::add(a, b, out);
  return out;
}

Vec tanh(std::span<const double> x) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::tanh(x[i]);
  return out;
}

Vec sigmoid(std::span<const double> x) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = fn::logistic(x[i]);
  return out;
}

Vec softplus(std::span<const double> x) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = fn::softplus(x[i]);
  return out;
}

Vec concat(std::span<const double> a, std::span<const double> b) {
  Vec out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

double sum(std::span<const double> x) {
  double total = 0.0;
  for (double v : x) total += v;
  return total;
}

Vec negate(std::span<const double> x) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
  return out;
}

Vec scale(std::span<const double> x, double factor) {
  Vec out(x.begin(), x.end());
  simd::scale_in_place(out, factor);
  return out;
}

double bce(double probability, double target) { return fn::bce(probability, target); }

}  // namespace sponge::forward
