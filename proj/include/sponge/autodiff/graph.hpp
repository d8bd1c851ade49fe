#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sponge/autodiff/tensor.hpp"

namespace sponge {

struct NodeId {
  std::uint32_t index = 0;
  friend bool operator==(NodeId, NodeId) = default;
};

enum class OpKind : std::uint8_t {
  input,
  constant,
  matvec,
  add,
  tanh,
  sigmoid,
  softplus,
  concat,
  sum,
  negate,
  scale,
  bce,
};

const char* op_name(OpKind kind);

// Reverse-mode tape. Nodes are appended in evaluation order, so every parent
// index precedes its child and the tape is already topologically sorted.
//
// A graph supports exactly one backward pass. Gradients exist for every node
// afterwards; nodes the root does not depend on read as exact zeros.
// Not thread-safe; build one graph per thread.
class Graph {
 public:
  Graph() = default;

  // Differentiable leaf.
  NodeId input(Tensor value);
  // Leaf excluded from differentiation.
  NodeId constant(Tensor value);

  // [r, c] x [c] -> [r]
  NodeId matvec(NodeId matrix, NodeId vector);
  NodeId add(NodeId a, NodeId b);
  NodeId tanh(NodeId x);
  NodeId sigmoid(NodeId x);
  NodeId softplus(NodeId x);
  // [n] ++ [m] -> [n + m]
  NodeId concat(NodeId a, NodeId b);
  // any shape -> scalar
  NodeId sum(NodeId x);
  NodeId negate(NodeId x);
  NodeId scale(NodeId x, double factor);
  // Size-1 probability against a fixed target -> scalar loss.
  NodeId bce(NodeId probability, double target);

  const Tensor& value(NodeId id) const;
  OpKind kind(NodeId id) const;
  std::size_t size() const { return nodes_.size(); }

  void backward(NodeId root);
  bool has_gradients() const { return backward_done_; }
  std::span<const double> gradient(NodeId id) const;

 private:
  struct Node {
    OpKind kind;
    NodeId lhs;
    NodeId rhs;
    double param = 0.0;  // scale factor or bce target
    bool requires_grad = false;
    Tensor value;
  };

  NodeId push(OpKind kind, NodeId lhs, NodeId rhs, double param, bool requires_grad,
              Tensor value);
  const Node& node(NodeId id) const;
  std::vector<double>& grad_slot(NodeId id);

  std::vector<Node> nodes_;
  std::vector<std::vector<double>> grads_;
  bool backward_done_ = false;
};

}  // namespace sponge
