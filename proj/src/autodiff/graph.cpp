#include "sponge/autodiff/graph.hpp"

#include <string>

#include "sponge/autodiff/forward_ops.hpp"
#include "sponge/autodiff/functions.hpp"
#include "sponge/error.hpp"
#include "sponge/simd/kernels.hpp"

namespace sponge {

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::input: return "input";
    case OpKind::constant: return "constant";
    case OpKind::matvec: return "matvec";
    case OpKind::add: return "add";
    case OpKind::tanh: return "tanh";
    case OpKind::sigmoid: return "sigmoid";
    case OpKind::softplus: return "softplus";
    case OpKind::concat: return "concat";
    case OpKind::sum: return "sum";
    case OpKind::negate: return "negate";
    case OpKind::scale: return "scale";
    case OpKind::bce: return "bce";
  }
  return "unknown";
}

namespace {

[[noreturn]] void shape_mismatch(OpKind kind, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op_name(kind)) + ": incompatible shapes " +
                   shape_to_string(a.shape()) + " and " + shape_to_string(b.shape()));
}

}  // namespace

NodeId Graph::push(OpKind kind, NodeId lhs, NodeId rhs, double param, bool requires_grad,
                   Tensor value) {
  if (backward_done_) throw GraphError("cannot extend a graph after backward()");
  nodes_.push_back(Node{kind, lhs, rhs, param, requires_grad, std::move(value)});
  return NodeId{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Graph::Node& Graph::node(NodeId id) const {
  if (id.index >= nodes_.size()) {
    throw GraphError("node " + std::to_string(id.index) + " does not belong to this graph");
  }
  return nodes_[id.index];
}

NodeId Graph::input(Tensor value) { return push(OpKind::input, {}, {}, 0.0, true, std::move(value)); }

NodeId Graph::constant(Tensor value) {
  return push(OpKind::constant, {}, {}, 0.0, false, std::move(value));
}

NodeId Graph::matvec(NodeId matrix, NodeId vector) {
  const Node& m = node(matrix);
  const Node& v = node(vector);
  if (m.value.rank() != 2 || v.value.rank() != 1 || m.value.shape()[1] != v.value.shape()[0]) {
    shape_mismatch(OpKind::matvec, m.value, v.value);
  }
  const std::size_t rows = m.value.shape()[0];
  const std::size_t cols = m.value.shape()[1];
  Tensor out({rows}, forward::matvec(m.value.data(), rows, cols, v.value.data()));
  return push(OpKind::matvec, matrix, vector, 0.0, m.requires_grad || v.requires_grad,
              std::move(out));
}

NodeId Graph::add(NodeId a, NodeId b) {
  const Node& x = node(a);
  const Node& y = node(b);
  if (x.value.shape() != y.value.shape()) shape_mismatch(OpKind::add, x.value, y.value);
  Tensor out(x.value.shape(), forward::add(x.value.data(), y.value.data()));
  return push(OpKind::add, a, b, 0.0, x.requires_grad || y.requires_grad, std::move(out));
}

NodeId Graph::tanh(NodeId x) {
  const Node& n = node(x);
  Tensor out(n.value.shape(), forward::tanh(n.value.data()));
  return push(OpKind::tanh, x, {}, 0.0, n.requires_grad, std::move(out));
}

NodeId Graph::sigmoid(NodeId x) {
  const Node& n = node(x);
  Tensor out(n.value.shape(), forward::sigmoid(n.value.data()));
  return push(OpKind::sigmoid, x, {}, 0.0, n.requires_grad, std::move(out));
}

NodeId Graph::softplus(NodeId x) {
  const Node& n = node(x);
  Tensor out(n.value.shape(), forward::softplus(n.value.data()));
  return push(OpKind::softplus, x, {}, 0.0, n.requires_grad, std::move(out));
}

NodeId Graph::concat(NodeId a, NodeId b) {
  const Node& x = node(a);
  const Node& y = node(b);
  if (x.value.rank() != 1 || y.value.rank() != 1) shape_mismatch(OpKind::concat, x.value, y.value);
  Tensor out({x.value.size() + y.value.size()}, forward::concat(x.value.data(), y.value.data()));
  return push(OpKind::concat, a, b, 0.0, x.requires_grad || y.requires_grad, std::move(out));
}

NodeId Graph::sum(NodeId x) {
  const Node& n = node(x);
  return push(OpKind::sum, x, {}, 0.0, n.requires_grad, Tensor::scalar(forward::sum(n.value.data())));
}

NodeId Graph::negate(NodeId x) {
  const Node& n = node(x);
  Tensor out(n.value.shape(), forward::negate(n.value.data()));
  return push(OpKind::negate, x, {}, 0.0, n.requires_grad, std::move(out));
}

NodeId Graph::scale(NodeId x, double factor) {
  const Node& n = node(x);
  Tensor out(n.value.shape(), forward::scale(n.value.data(), factor));
  return push(OpKind::scale, x, {}, factor, n.requires_grad, std::move(out));
}

NodeId Graph::bce(NodeId probability, double target) {
  const Node& n = node(probability);
  if (n.value.size() != 1) {
    throw ShapeError("bce: probability must hold one element, got shape " +
                     shape_to_string(n.value.shape()));
  }
  const double loss = forward::bce(n.value.item(), target);
  return push(OpKind::bce, probability, {}, target, n.requires_grad, Tensor::scalar(loss));
}

const Tensor& Graph::value(NodeId id) const { return node(id).value; }

OpKind Graph::kind(NodeId id) const { return node(id).kind; }

std::vector<double>& Graph::grad_slot(NodeId id) { return grads_[id.index]; }

void Graph::backward(NodeId root) {
  if (backward_done_) throw GraphError("backward() already ran on this graph");
  const Node& r = node(root);
  if (r.value.size() != 1) {
    throw GraphError("backward() root must be scalar, got shape " + shape_to_string(r.value.shape()));
  }

  grads_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) grads_[i].assign(nodes_[i].value.size(), 0.0);
  grads_[root.index][0] = 1.0;

  for (std::size_t i = root.index + 1; i-- > 0;) {
    const Node& n = nodes_[i];
    if (!n.requires_grad) continue;
    const std::vector<double>& g = grads_[i];
    switch (n.kind) {
      case OpKind::input:
      case OpKind::constant:
        break;
      case OpKind::matvec: {
        const Node& m = nodes_[n.lhs.index];
        const Node& v = nodes_[n.rhs.index];
        const std::size_t rows = m.value.shape()[0];
        const std::size_t cols = m.value.shape()[1];
        if (v.requires_grad) {
          simd::matvec_transposed_accumulate(m.value.data(), rows, cols, g, grad_slot(n.rhs));
        }
        if (m.requires_grad) {
          auto& gm = grad_slot(n.lhs);
          for (std::size_t row = 0; row < rows; ++row) {
            simd::axpy(g[row], v.value.data(),
                       std::span<double>(gm.data() + row * cols, cols));
          }
        }
        break;
      }
      case OpKind::add:
        if (nodes_[n.lhs.index].requires_grad) simd::axpy(1.0, g, grad_slot(n.lhs));
        if (nodes_[n.rhs.index].requires_grad) simd::axpy(1.0, g, grad_slot(n.rhs));
        break;
      case OpKind::tanh:
#if defined(SPONGE_INJECT_DERIVATIVE_FAULT)
        // Negative-control build: deliberately wrong derivative (1 - y).
        {
          auto& gx = grad_slot(n.lhs);
          for (std::size_t k = 0; k < g.size(); ++k) gx[k] += g[k] * (1.0 - n.value[k]);
        }
#else
        simd::tanh_backward_accumulate(n.value.data(), g, grad_slot(n.lhs));
#endif
        break;
      case OpKind::sigmoid:
        simd::sigmoid_backward_accumulate(n.value.data(), g, grad_slot(n.lhs));
        break;
      case OpKind::softplus: {
        const auto x = nodes_[n.lhs.index].value.data();
        auto& gx = grad_slot(n.lhs);
        for (std::size_t k = 0; k < g.size(); ++k) gx[k] += g[k] * fn::logistic(x[k]);
        break;
      }
      case OpKind::concat: {
        const std::size_t split = nodes_[n.lhs.index].value.size();
        if (nodes_[n.lhs.index].requires_grad) {
          simd::axpy(1.0, std::span<const double>(g.data(), split), grad_slot(n.lhs));
        }
        if (nodes_[n.rhs.index].requires_grad) {
          simd::axpy(1.0, std::span<const double>(g.data() + split, g.size() - split),
                     grad_slot(n.rhs));
        }
        break;
      }
      case OpKind::sum: {
        auto& gx = grad_slot(n.lhs);
        for (double& v : gx) v += g[0];
        break;
      }
      case OpKind::negate:
        simd::axpy(-1.0, g, grad_slot(n.lhs));
        break;
      case OpKind::scale:
        simd::axpy(n.param, g, grad_slot(n.lhs));
        break;
      case OpKind::bce: {
        const double p = nodes_[n.lhs.index].value.item();
        grad_slot(n.lhs)[0] += g[0] * fn::bce_derivative(p, n.param);
        break;
      }
    }
  }
  backward_done_ = true;
}

std::span<const double> Graph::gradient(NodeId id) const {
  if (!backward_done_) throw GraphError("gradients are undefined before backward()");
  node(id);
  return grads_[id.index];
}

}  // namespace sponge
