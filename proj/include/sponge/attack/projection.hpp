#pragma once

#include <span>
#include <vector>

#include "sponge/attack/config.hpp"

namespace sponge {

double vector_norm(std::span<const double> v, Norm norm);

// Closest point of the eps-ball: radial scaling for l2, coordinate clamp for linf.
void project_in_place(std::span<double> delta, double eps, Norm norm);
std::vector<double> project(std::vector<double> delta, double eps, Norm norm);

// delta <- project(delta - alpha * sign(grad)), with sign(0) = 0.
// Throws AttackError if grad holds a NaN or infinity.
void pgd_step(std::vector<double>& delta, std::span<const double> grad, double alpha, double eps,
              Norm norm);

}  // namespace sponge
