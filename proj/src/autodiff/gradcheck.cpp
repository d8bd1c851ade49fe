#include "sponge/autodiff/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "sponge/error.hpp"

namespace sponge {

GradCheckResult compare_with_central_differences(
    const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& at,
    const std::vector<double>& analytic, double h) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  if (analytic.size() != at.size()) {
    throw ShapeError("gradient has " + std::to_string(analytic.size()) + " entries for a " +
                     std::to_string(at.size()) + "-dimensional point");
  }
  GradCheckResult result;
  result.analytic = analytic;
  result.numeric.resize(at.size());
  std::vector<double> probe = at;
  for (std::size_t i = 0; i < at.size(); ++i) {
    probe[i] = at[i] + h;
    const double up = f(probe);
    probe[i] = at[i] - h;
    const double down = f(probe);
    probe[i] = at[i];
    result.numeric[i] = (up - down) / (2.0 * h);
    const double err =
        std::fabs(analytic[i] - result.numeric[i]) / std::max(1.0, std::fabs(analytic[i]));
    result.max_relative_error = std::max(result.max_relative_error, err);
  }
  return result;
}

GradCheckResult grad_check(const GraphBuilder& build, const Tensor& at, double h) {
  Graph graph;
  const NodeId leaf = graph.input(at);
  const NodeId root = build(graph, leaf);
  graph.backward(root);
  const auto g = graph.gradient(leaf);
  std::vector<double> analytic(g.begin(), g.end());

  const Shape shape = at.shape();
  auto evaluate = [&](const std::vector<double>& point) {
    Graph probe;
    const NodeId x = probe.input(Tensor(shape, point));
    return probe.value(build(probe, x)).item();
  };
  std::vector<double> origin(at.data().begin(), at.data().end());
  return compare_with_central_differences(evaluate, origin, analytic, h);
}

}  // namespace sponge
