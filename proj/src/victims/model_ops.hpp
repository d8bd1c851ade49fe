#pragma once

// Two interchangeable arithmetic backends for the surrogate models. The model
// code is written once as a template over these; TapeOps records a Graph while
// BufferOps just computes. Both route through sponge::forward, so outputs
// agree exactly.

#include <span>
#include <vector>

#include "sponge/autodiff/forward_ops.hpp"
#include "sponge/autodiff/graph.hpp"
#include "sponge/autodiff/tensor.hpp"

namespace sponge::detail {

class TapeOps {
 public:
  using Value = NodeId;
  using Weight = NodeId;

  explicit TapeOps(Graph& graph) : graph_(graph) {}

  Value input(std::span<const double> v) {
    return graph_.input(Tensor::vector({v.begin(), v.end()}));
  }
  Weight weight(const Tensor& w) { return graph_.constant(w); }
  Value constant(const Tensor& b) { return graph_.constant(b); }

  Value matvec(Weight w, Value x) { return graph_.matvec(w, x); }
  Value add(Value a, Value b) { return graph_.add(a, b); }
  Value tanh(Value x) { return graph_.tanh(x); }
  Value sigmoid(Value x) { return graph_.sigmoid(x); }
  Value softplus(Value x) { return graph_.softplus(x); }
  Value concat(Value a, Value b) { return graph_.concat(a, b); }
  Value scale(Value x, double f) { return graph_.scale(x, f); }
  Value sum(Value x) { return graph_.sum(x); }
  Value negate(Value x) { return graph_.negate(x); }
  Value bce(Value p, double y) { return graph_.bce(p, y); }

  double item(Value v) const { return graph_.value(v).data()[0]; }

 private:
  Graph& graph_;
};

class BufferOps {
 public:
  using Value = std::vector<double>;
  using Weight = const Tensor*;

  Value input(std::span<const double> v) { return {v.begin(), v.end()}; }
  Weight weight(const Tensor& w) { return &w; }
  Value constant(const Tensor& b) { return {b.data().begin(), b.data().end()}; }

  Value matvec(Weight w, const Value& x) {
    return forward::matvec(w->data(), w->shape()[0], w->shape()[1], x);
  }
  Value add(const Value& a, const Value& b) { return forward::add(a, b); }
  Value tanh(const Value& x) { return forward::tanh(x); }
  Value sigmoid(const Value& x) { return forward::sigmoid(x); }
  Value softplus(const Value& x) { return forward::softplus(x); }
  Value concat(const Value& a, const Value& b) { return forward::concat(a, b); }
  Value scale(const Value& x, double f) { return forward::scale(x, f); }
  Value sum(const Value& x) { return {forward::sum(x)}; }
  Value negate(const Value& x) { return forward::negate(x); }
  Value bce(const Value& p, double y) { return {forward::bce(p[0], y)}; }

  double item(const Value& v) const { return v[0]; }
};

}  // namespace sponge::detail
