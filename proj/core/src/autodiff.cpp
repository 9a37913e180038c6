#include "rcae/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace rcae::ad {

NodeId Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::constant(Matrix v) {
  Node n;
  n.op = Op::kConstant;
  n.val = std::move(v);
  return push(std::move(n));
}

NodeId Tape::param(Matrix v) {
  Node n;
  n.op = Op::kParam;
  n.val = std::move(v);
  n.needs_grad = true;
  return push(std::move(n));
}

NodeId Tape::matmul(NodeId a, NodeId b) {
  Node n;
  n.op = Op::kMatMul;
  n.a = a;
  n.b = b;
  n.val = nodes_[a].val * nodes_[b].val;
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(n));
}

NodeId Tape::add(NodeId a, NodeId b) {
  Node n;
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.val = nodes_[a].val + nodes_[b].val;
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(n));
}

NodeId Tape::sub(NodeId a, NodeId b) {
  Node n;
  n.op = Op::kSub;
  n.a = a;
  n.b = b;
  n.val = nodes_[a].val - nodes_[b].val;
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(n));
}

NodeId Tape::scale(NodeId a, double c) {
  Node n;
  n.op = Op::kScale;
  n.a = a;
  n.c = c;
  n.val = nodes_[a].val.scaled(c);
  n.needs_grad = nodes_[a].needs_grad;
  return push(std::move(n));
}

NodeId Tape::tanh_of(NodeId a) {
  Node n;
  n.op = Op::kTanh;
  n.a = a;
  n.val = nodes_[a].val;
  for (int i = 0; i < n.val.rows(); ++i)
    for (int j = 0; j < n.val.cols(); ++j) n.val(i, j) = std::tanh(n.val(i, j));
  n.needs_grad = nodes_[a].needs_grad;
  return push(std::move(n));
}

NodeId Tape::one_minus_square(NodeId a) {
  Node n;
  n.op = Op::kOneMinusSquare;
  n.a = a;
  n.val = nodes_[a].val;
  for (int i = 0; i < n.val.rows(); ++i)
    for (int j = 0; j < n.val.cols(); ++j) {
      const double x = n.val(i, j);
      n.val(i, j) = 1.0 - x * x;
    }
  n.needs_grad = nodes_[a].needs_grad;
  return push(std::move(n));
}

NodeId Tape::scale_rows(NodeId a, NodeId s) {
  const Matrix& av = nodes_[a].val;
  const Matrix& sv = nodes_[s].val;
  if (sv.cols() != 1 || sv.rows() != av.rows())
    throw std::invalid_argument("scale_rows: scale must be a column vector matching rows");
  Node n;
  n.op = Op::kScaleRows;
  n.a = a;
  n.b = s;
  n.val = av;
  for (int i = 0; i < av.rows(); ++i) {
    const double si = sv(i, 0);
    for (int j = 0; j < av.cols(); ++j) n.val(i, j) *= si;
  }
  n.needs_grad = nodes_[a].needs_grad || nodes_[s].needs_grad;
  return push(std::move(n));
}

NodeId Tape::frob_sq(NodeId a) {
  Node n;
  n.op = Op::kFrobSq;
  n.a = a;
  n.val = Matrix(1, 1);
  n.val(0, 0) = nodes_[a].val.frobenius_norm_sq();
  n.needs_grad = nodes_[a].needs_grad;
  return push(std::move(n));
}

NodeId Tape::dot(NodeId a, NodeId b) {
  const Matrix& av = nodes_[a].val;
  const Matrix& bv = nodes_[b].val;
  if (av.rows() != bv.rows() || av.cols() != bv.cols())
    throw std::invalid_argument("dot: shape mismatch");
  Node n;
  n.op = Op::kDot;
  n.a = a;
  n.b = b;
  n.val = Matrix(1, 1);
  double s = 0.0;
  for (int i = 0; i < av.rows(); ++i)
    for (int j = 0; j < av.cols(); ++j) s += av(i, j) * bv(i, j);
  n.val(0, 0) = s;
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(n));
}

NodeId Tape::div(NodeId a, NodeId b) {
  if (nodes_[a].val.size() != 1 || nodes_[b].val.size() != 1)
    throw std::invalid_argument("div: scalar nodes only");
  Node n;
  n.op = Op::kDiv;
  n.a = a;
  n.b = b;
  n.val = Matrix(1, 1);
  n.val(0, 0) = nodes_[a].val(0, 0) / nodes_[b].val(0, 0);
  n.needs_grad = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(n));
}

NodeId Tape::logsumexp(NodeId a) {
  const Matrix& av = nodes_[a].val;
  if (av.cols() != 1) throw std::invalid_argument("logsumexp: column vector expected");
  Node n;
  n.op = Op::kLogSumExp;
  n.a = a;
  double mx = av(0, 0);
  for (int i = 1; i < av.rows(); ++i) mx = std::max(mx, av(i, 0));
  double s = 0.0;
  for (int i = 0; i < av.rows(); ++i) s += std::exp(av(i, 0) - mx);
  n.val = Matrix(1, 1);
  n.val(0, 0) = mx + std::log(s);
  n.needs_grad = nodes_[a].needs_grad;
  return push(std::move(n));
}

NodeId Tape::entry(NodeId a, int i) {
  const Matrix& av = nodes_[a].val;
  if (av.cols() != 1 || i < 0 || i >= av.rows()) throw std::invalid_argument("entry: bad index");
  Node n;
  n.op = Op::kEntry;
  n.a = a;
  n.c = static_cast<double>(i);
  n.val = Matrix(1, 1);
  n.val(0, 0) = av(i, 0);
  n.needs_grad = nodes_[a].needs_grad;
  return push(std::move(n));
}

Matrix& Tape::grad_slot(NodeId id) {
  Node& n = nodes_[id];
  if (!n.grad_alloc) {
    n.grad = Matrix(n.val.rows(), n.val.cols());
    n.grad_alloc = true;
  }
  return n.grad;
}

const Matrix& Tape::grad(NodeId id) const {
  const Node& n = nodes_[id];
  if (!n.grad_alloc) throw std::runtime_error("grad: node has no gradient (run backward first)");
  return n.grad;
}

Matrix Tape::grad_or_zero(NodeId id) const {
  const Node& n = nodes_[id];
  if (!n.grad_alloc) return Matrix(n.val.rows(), n.val.cols());
  return n.grad;
}

void Tape::backward(NodeId seed) {
  if (ran_backward_) throw std::runtime_error("backward: tape already differentiated");
  ran_backward_ = true;
  if (nodes_[seed].val.size() != 1) throw std::invalid_argument("backward: seed must be scalar");
  grad_slot(seed)(0, 0) = 1.0;

  for (NodeId id = seed; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.needs_grad || !n.grad_alloc) continue;
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::kConstant:
      case Op::kParam:
        break;
      case Op::kMatMul: {
        const Matrix& av = nodes_[n.a].val;
        const Matrix& bv = nodes_[n.b].val;
        if (nodes_[n.a].needs_grad) grad_slot(n.a) += g * bv.transposed();
        if (nodes_[n.b].needs_grad) grad_slot(n.b) += av.transposed() * g;
        break;
      }
      case Op::kAdd: {
        if (nodes_[n.a].needs_grad) grad_slot(n.a) += g;
        if (nodes_[n.b].needs_grad) grad_slot(n.b) += g;
        break;
      }
      case Op::kSub: {
        if (nodes_[n.a].needs_grad) grad_slot(n.a) += g;
        if (nodes_[n.b].needs_grad) grad_slot(n.b) -= g;
        break;
      }
      case Op::kScale: {
        if (nodes_[n.a].needs_grad) grad_slot(n.a) += g.scaled(n.c);
        break;
      }
      case Op::kTanh: {
        if (nodes_[n.a].needs_grad) {
          Matrix& ga = grad_slot(n.a);
          for (int i = 0; i < g.rows(); ++i)
            for (int j = 0; j < g.cols(); ++j) {
              const double t = n.val(i, j);
              ga(i, j) += g(i, j) * (1.0 - t * t);
            }
        }
        break;
      }
      case Op::kOneMinusSquare: {
        if (nodes_[n.a].needs_grad) {
          Matrix& ga = grad_slot(n.a);
          const Matrix& av = nodes_[n.a].val;
          for (int i = 0; i < g.rows(); ++i)
            for (int j = 0; j < g.cols(); ++j) ga(i, j) += g(i, j) * (-2.0 * av(i, j));
        }
        break;
      }
      case Op::kScaleRows: {
        const Matrix& av = nodes_[n.a].val;
        const Matrix& sv = nodes_[n.b].val;
        if (nodes_[n.a].needs_grad) {
          Matrix& ga = grad_slot(n.a);
          for (int i = 0; i < g.rows(); ++i) {
            const double si = sv(i, 0);
            for (int j = 0; j < g.cols(); ++j) ga(i, j) += g(i, j) * si;
          }
        }
        if (nodes_[n.b].needs_grad) {
          Matrix& gs = grad_slot(n.b);
          for (int i = 0; i < g.rows(); ++i) {
            double s = 0.0;
            for (int j = 0; j < g.cols(); ++j) s += g(i, j) * av(i, j);
            gs(i, 0) += s;
          }
        }
        break;
      }
      case Op::kFrobSq: {
        if (nodes_[n.a].needs_grad) grad_slot(n.a) += nodes_[n.a].val.scaled(2.0 * g(0, 0));
        break;
      }
      case Op::kDot: {
        if (nodes_[n.a].needs_grad) grad_slot(n.a) += nodes_[n.b].val.scaled(g(0, 0));
        if (nodes_[n.b].needs_grad) grad_slot(n.b) += nodes_[n.a].val.scaled(g(0, 0));
        break;
      }
      case Op::kDiv: {
        const double av = nodes_[n.a].val(0, 0);
        const double bv = nodes_[n.b].val(0, 0);
        if (nodes_[n.a].needs_grad) grad_slot(n.a)(0, 0) += g(0, 0) / bv;
        if (nodes_[n.b].needs_grad) grad_slot(n.b)(0, 0) += -g(0, 0) * av / (bv * bv);
        break;
      }
      case Op::kLogSumExp: {
        if (nodes_[n.a].needs_grad) {
          const Matrix& av = nodes_[n.a].val;
          Matrix& ga = grad_slot(n.a);
          const double lse = n.val(0, 0);
          for (int i = 0; i < av.rows(); ++i) ga(i, 0) += g(0, 0) * std::exp(av(i, 0) - lse);
        }
        break;
      }
      case Op::kEntry: {
        if (nodes_[n.a].needs_grad) grad_slot(n.a)(static_cast<int>(n.c), 0) += g(0, 0);
        break;
      }
    }
  }
}

}  // namespace rcae::ad
