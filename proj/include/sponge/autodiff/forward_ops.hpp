#pragma once

#include <span>
#include <vector>

// Forward arithmetic of every tape primitive on plain buffers. Graph nodes and
// the graph-free victim evaluators both go through these, which is what makes
// a frame count computed with or without a tape identical.
namespace sponge::forward {

using Vec = std::vector<double>;

Vec matvec(std::span<const double> matrix, std::size_t rows, std::size_t cols,
           std::span<const double> x);
Vec add(std::span<const double> a, std::span<const double> b);
Vec tanh(std::span<const double> x);
Vec sigmoid(std::span<const double> x);
Vec softplus(std::span<const double> x);
Vec concat(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
Vec negate(std::span<const double> x);
Vec scale(std::span<const double> x, double factor);
double bce(double probability, double target);

}  // namespace sponge::forward
