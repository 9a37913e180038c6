#pragma once

#include <vector>

#include "rcae/matrix.hpp"

namespace rcae::ad {

using NodeId = int;

/// Reverse-mode tape over matrix-valued nodes. Scalars are 1x1 matrices.
/// Every operation's partial derivatives are exact, so any scalar node built
/// from the ops below differentiates exactly with respect to any Param leaf
/// -- including scalars that depend on input-space Jacobians, because
/// Jacobian forward-propagation is itself expressed in these ops.
class Tape {
 public:
  /// Leaf that does not require gradients.
  NodeId constant(Matrix v);
  /// Leaf that accumulates gradients.
  NodeId param(Matrix v);

  NodeId matmul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId scale(NodeId a, double c);
  /// Elementwise tanh.
  NodeId tanh_of(NodeId a);
  /// Elementwise 1 - x^2 (tanh derivative when fed the tanh value).
  NodeId one_minus_square(NodeId a);
  /// Row i of a scaled by s(i, 0); s is a column vector node.
  NodeId scale_rows(NodeId a, NodeId s);
  /// Scalar: sum of squared entries.
  NodeId frob_sq(NodeId a);
  /// Scalar: sum of elementwise products (inner product; on 1x1 nodes this
  /// is plain multiplication).
  NodeId dot(NodeId a, NodeId b);
  /// Scalar division a / b for 1x1 nodes.
  NodeId div(NodeId a, NodeId b);
  /// Scalar log(sum(exp(a_i))) for a column vector node, max-shifted.
  NodeId logsumexp(NodeId a);
  /// Scalar a(i, 0) for a column vector node.
  NodeId entry(NodeId a, int i);

  const Matrix& value(NodeId id) const { return nodes_[id].val; }
  double scalar(NodeId id) const { return nodes_[id].val(0, 0); }
  bool requires_grad(NodeId id) const { return nodes_[id].needs_grad; }

  /// Backpropagate from a scalar node; fills gradients of all reachable
  /// grad-requiring nodes. May be called once per tape.
  void backward(NodeId seed);
  const Matrix& grad(NodeId id) const;
  /// Gradient of a node, or the zero matrix when the node was not reached
  /// by backward (a parameter the loss does not depend on).
  Matrix grad_or_zero(NodeId id) const;

  size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op {
    kConstant,
    kParam,
    kMatMul,
    kAdd,
    kSub,
    kScale,
    kTanh,
    kOneMinusSquare,
    kScaleRows,
    kFrobSq,
    kDot,
    kDiv,
    kLogSumExp,
    kEntry,
  };

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    double c = 0.0;  // constant payload (scale factor / entry index)
    Matrix val;
    Matrix grad;
    bool needs_grad = false;
    bool grad_alloc = false;
  };

  NodeId push(Node n);
  Matrix& grad_slot(NodeId id);

  std::vector<Node> nodes_;
  bool ran_backward_ = false;
};

}  // namespace rcae::ad
