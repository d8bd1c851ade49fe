#pragma once

#include <functional>
#include <vector>

#include "sponge/autodiff/graph.hpp"

namespace sponge {

// Builds a scalar-valued graph from one differentiable input and returns the root.
using GraphBuilder = std::function<NodeId(Graph&, NodeId input)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::vector<double> analytic;
  std::vector<double> numeric;
};

// Compares the tape gradient at `at` against central differences with step h.
// Error per coordinate is |analytic - numeric| / max(1, |analytic|).
GradCheckResult grad_check(const GraphBuilder& build, const Tensor& at, double h);

// Same comparison for an arbitrary scalar function and a caller-supplied gradient.
GradCheckResult compare_with_central_differences(
    const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& at,
    const std::vector<double>& analytic, double h);

}  // namespace sponge
