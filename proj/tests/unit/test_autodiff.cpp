#include <doctest.h>

#include <cmath>
#include <limits>

#include "sponge/autodiff/forward_ops.hpp"
#include "sponge/autodiff/gradcheck.hpp"
#include "sponge/autodiff/graph.hpp"
#include "sponge/error.hpp"
#include "sponge/random.hpp"

using namespace sponge;

namespace {

double scalar_of(const Graph& g, NodeId id) { return g.value(id).item(); }

Tensor random_vector(Rng& rng, std::size_t n) { return Tensor::vector(rng.gaussian_vector(n)); }

Tensor random_matrix(Rng& rng, std::size_t r, std::size_t c, double scale) {
  auto v = rng.gaussian_vector(r * c);
  for (double& x : v) x *= scale;
  return Tensor::matrix(r, c, std::move(v));
}

}  // namespace

TEST_CASE("tensor construction checks shape and finiteness") {
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0, 3.0}), ShapeError);
  CHECK_THROWS_AS(Tensor::vector({1.0, std::numeric_limits<double>::quiet_NaN()}),
                  NonFiniteError);
  CHECK_THROWS_AS(Tensor::vector({std::numeric_limits<double>::infinity()}), NonFiniteError);
  CHECK(Tensor::matrix(2, 3, std::vector<double>(6, 1.0)).size() == 6);
  CHECK_THROWS_AS(Tensor::vector({1.0, 2.0}).item(), ShapeError);
}

TEST_CASE("primitive forward values") {
  Graph g;
  const auto zero = g.input(Tensor::vector({0.0}));
  CHECK(scalar_of(g, g.sigmoid(zero)) == 0.5);
  CHECK(scalar_of(g, g.softplus(zero)) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const auto half = g.constant(Tensor::vector({0.5}));
  CHECK(scalar_of(g, g.bce(half, 0.0)) == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(scalar_of(g, g.bce(half, 0.0)) == doctest::Approx(-std::log(0.5)).epsilon(1e-15));

  const auto m = g.constant(Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6}));
  const auto x = g.input(Tensor::vector({1, 0, -1}));
  const auto y = g.matvec(m, x);
  CHECK(g.value(y) == Tensor::vector({-2, -2}));
  const auto c = g.concat(y, x);
  CHECK(g.value(c) == Tensor::vector({-2, -2, 1, 0, -1}));
  CHECK(scalar_of(g, g.sum(c)) == -4.0);
  CHECK(g.value(g.negate(x)) == Tensor::vector({-1, -0.0, 1}));
  CHECK(g.value(g.scale(x, 2.5)) == Tensor::vector({2.5, 0, -2.5}));
}

TEST_CASE("bce clamps probabilities away from 0 and 1") {
  CHECK(std::isfinite(forward::bce(0.0, 1.0)));
  CHECK(std::isfinite(forward::bce(1.0, 0.0)));
  CHECK(forward::bce(1.0, 0.0) == doctest::Approx(-std::log(1e-7)).epsilon(1e-9));
  // Inside the clamp the derivative is live; outside it vanishes.
  Graph g;
  const auto p = g.input(Tensor::vector({1.0}));
  const auto loss = g.bce(p, 0.0);
  g.backward(loss);
  CHECK(g.gradient(p)[0] == 0.0);
}

TEST_CASE("shape mismatch names both shapes") {
  Graph g;
  const auto a = g.input(Tensor::vector({1, 2}));
  const auto b = g.input(Tensor::vector({1, 2, 3}));
  try {
    g.add(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    CHECK(what.find("[2]") != std::string::npos);
    CHECK(what.find("[3]") != std::string::npos);
  }
  const auto m = g.constant(Tensor::matrix(2, 2, {1, 0, 0, 1}));
  CHECK_THROWS_AS(g.matvec(m, b), ShapeError);
  CHECK_THROWS_AS(g.bce(a, 0.0), ShapeError);
}

TEST_CASE("backward on simple functions") {
  SUBCASE("sigmoid at zero") {
    Graph g;
    const auto x = g.input(Tensor::vector({0.0}));
    g.backward(g.sum(g.sigmoid(x)));
    CHECK(g.gradient(x)[0] == 0.25);
  }
  SUBCASE("sum of tanh at the origin") {
    Graph g;
    const auto x = g.input(Tensor::vector({0.0, 0.0}));
    g.backward(g.sum(g.tanh(x)));
    CHECK(g.gradient(x)[0] == 1.0);
    CHECK(g.gradient(x)[1] == 1.0);
  }
}

TEST_CASE("backward misuse is reported") {
  Graph g;
  const auto x = g.input(Tensor::vector({1.0, 2.0}));
  CHECK_THROWS_AS(g.gradient(x), GraphError);
  CHECK_THROWS_AS(g.backward(x), GraphError);  // not scalar
  const auto s = g.sum(x);
  g.backward(s);
  CHECK_THROWS_AS(g.backward(s), GraphError);
  CHECK_THROWS_AS(g.tanh(x), GraphError);  // graph is frozen after backward
}

TEST_CASE("unreached leaves get exact zero gradients") {
  Graph g;
  const auto used = g.input(Tensor::vector({0.3, -0.2}));
  const auto unused = g.input(Tensor::vector({0.0, 0.0, 0.0}));
  const auto also_unused = g.input(Tensor::vector({5.0}));
  g.backward(g.sum(g.tanh(used)));
  for (double v : g.gradient(unused)) CHECK(v == 0.0);
  CHECK(g.gradient(also_unused)[0] == 0.0);
}

TEST_CASE("gradient of a sum is the sum of gradients") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x0 = random_vector(rng, 5);
    const Tensor w = random_matrix(rng, 4, 5, 0.5);
    auto f = [&](Graph& g, NodeId x) { return g.sum(g.tanh(g.matvec(g.constant(w), x))); };
    auto h = [&](Graph& g, NodeId x) { return g.sum(g.softplus(g.scale(x, 0.7))); };

    auto grad_of = [&](auto&& build) {
      Graph g;
      const auto x = g.input(x0);
      g.backward(build(g, x));
      const auto s = g.gradient(x);
      return std::vector<double>(s.begin(), s.end());
    };
    const auto gf = grad_of(f);
    const auto gh = grad_of(h);
    const auto gsum = grad_of([&](Graph& g, NodeId x) { return g.add(f(g, x), h(g, x)); });
    for (std::size_t i = 0; i < gsum.size(); ++i) {
      CHECK(gsum[i] == doctest::Approx(gf[i] + gh[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("a node used twice accumulates both paths") {
  Graph g;
  const auto x = g.input(Tensor::vector({0.5}));
  // f = x + x^... expressed as sum(x) + sum(scale(x, 3)) -> df/dx = 4.
  g.backward(g.add(g.sum(x), g.sum(g.scale(x, 3.0))));
  CHECK(g.gradient(x)[0] == 4.0);
}

TEST_CASE("grad_check on a linear map is exact") {
  Rng rng(11);
  const Tensor w = random_matrix(rng, 3, 4, 1.0);
  const Tensor at = random_vector(rng, 4);
  for (double h : {1e-3, 1e-5, 0.5}) {
    const auto r = grad_check(
        [&](Graph& g, NodeId x) { return g.sum(g.matvec(g.constant(w), x)); }, at, h);
    CHECK(r.max_relative_error <= 1e-10);
  }
  CHECK_THROWS_AS(grad_check([](Graph& g, NodeId x) { return g.sum(x); }, at, 0.0), ConfigError);
}

TEST_CASE("grad_check on bce of a logistic unit") {
  Rng rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    const Tensor w = random_matrix(rng, 1, 6, 0.5);
    const Tensor at = random_vector(rng, 6);
    const auto r = grad_check(
        [&](Graph& g, NodeId x) { return g.bce(g.sigmoid(g.matvec(g.constant(w), x)), 0.0); },
        at, 1e-5);
    CHECK(r.max_relative_error <= 1e-4);
  }
}

TEST_CASE("grad_check on a softplus chain") {
  Rng rng(13);
  const Tensor w1 = random_matrix(rng, 5, 4, 0.6);
  const Tensor w2 = random_matrix(rng, 3, 5, 0.6);
  const Tensor at = random_vector(rng, 4);
  const auto r = grad_check(
      [&](Graph& g, NodeId x) {
        auto h = g.softplus(g.matvec(g.constant(w1), x));
        h = g.softplus(g.matvec(g.constant(w2), h));
        return g.negate(g.sum(g.softplus(h)));
      },
      at, 1e-5);
  CHECK(r.max_relative_error <= 1e-4);
}

TEST_CASE("tape and buffer forward arithmetic agree exactly") {
  Rng rng(14);
  const Tensor w = random_matrix(rng, 6, 9, 0.4);
  const auto x = rng.gaussian_vector(9);
  Graph g;
  const auto node = g.tanh(g.matvec(g.constant(w), g.input(Tensor::vector(x))));
  const auto plain = forward::tanh(forward::matvec(w.data(), 6, 9, x));
  const auto tape = g.value(node).data();
  REQUIRE(plain.size() == tape.size());
  for (std::size_t i = 0; i < plain.size(); ++i) CHECK(plain[i] == tape[i]);
}
