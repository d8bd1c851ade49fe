#include "sponge/attack/projection.hpp"

#include <cmath>
#include <string>

#include "sponge/error.hpp"
#include "sponge/simd/kernels.hpp"

namespace sponge {

double vector_norm(std::span<const double> v, Norm norm) {
  return norm == Norm::l2 ? std::sqrt(simd::sum_squares(v)) : simd::max_abs(v);
}

void project_in_place(std::span<double> delta, double eps, Norm norm) {
  if (!(eps > 0.0)) throw ConfigError("projection radius must be positive");
  if (norm == Norm::linf) {
    simd::clamp_symmetric(delta, eps);
    return;
  }
  const double n = std::sqrt(simd::sum_squares(delta));
  if (n > eps) simd::scale_in_place(delta, eps / n);
}

std::vector<double> project(std::vector<double> delta, double eps, Norm norm) {
  project_in_place(delta, eps, norm);
  return delta;
}

void pgd_step(std::vector<double>& delta, std::span<const double> grad, double alpha, double eps,
              Norm norm) {
  if (grad.size() != delta.size()) {
    throw ShapeError("gradient has " + std::to_string(grad.size()) + " values, delta has " +
                     std::to_string(delta.size()));
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw AttackError("non-finite gradient at coordinate " + std::to_string(i) +
                        "; aborting attack");
    }
  }
  simd::sign_step(delta, grad, alpha);
  project_in_place(delta, eps, norm);
}

}  // namespace sponge
