// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/ad/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_set>

#include "lyrnet/error.hpp"

namespace lyrnet::ad {
namespace {

std::atomic<std::uint64_t> g_sequence{0};

std::shared_ptr<Node> new_node(Shape shape, std::vector<double> data, bool requires_grad) {
  if (numel(shape) != data.size()) {
    throw ShapeError("tensor data length " + std::to_string(data.size()) +
                     " does not match shape " + to_string(shape));
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->requires_grad = requires_grad;
  node->op = "leaf";
  node->sequence = g_sequence.fetch_add(1, std::memory_order_relaxed);
  return node;
}

}  // namespace

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::span<double> Node::grad_buffer() {
  if (grad.empty()) grad.assign(data.size(), 0.0);
  return grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const auto n = numel(shape);
  return Tensor(new_node(std::move(shape), std::vector<double>(n, value), requires_grad));
}

Tensor Tensor::from(Shape shape, std::vector<double> data, bool requires_grad) {
  return Tensor(new_node(std::move(shape), std::move(data), requires_grad));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor(new_node({}, {value}, requires_grad));
}

Tensor Tensor::make_result(Shape shape, std::vector<double> data, std::vector<Tensor> inputs,
                           BackwardFn backward, std::string op) {
  bool needs = false;
  for (const auto& in : inputs) needs = needs || in.requires_grad();
  auto node = new_node(std::move(shape), std::move(data), needs && backward);
  node->op = std::move(op);
  if (node->requires_grad) {
    node->inputs.reserve(inputs.size());
    for (auto& in : inputs) node->inputs.push_back(in.node_);
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

const Shape& Tensor::shape() const { return node_->shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= rank()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " +
                     to_string(shape()));
  }
  return node_->shape[axis];
}

std::size_t Tensor::size() const { return node_->data.size(); }
std::span<const double> Tensor::data() const { return node_->data; }
std::span<double> Tensor::mutable_data() { return node_->data; }

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item() on tensor of shape " + to_string(shape()));
  return node_->data[0];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }
void Tensor::set_requires_grad(bool value) { node_->requires_grad = value; }
bool Tensor::has_grad() const { return !node_->grad.empty(); }
std::span<const double> Tensor::grad() const { return node_->grad; }
std::span<double> Tensor::mutable_grad() { return node_->grad_buffer(); }

void Tensor::zero_grad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

const std::string& Tensor::op() const { return node_->op; }

Tensor Tensor::detach() const { return from(shape(), node_->data, false); }

Tensor Tensor::clone() const { return from(shape(), node_->data, requires_grad()); }

void Tensor::backward() const {
  if (size() != 1) {
    throw ContractError("backward() requires a scalar output, got shape " + to_string(shape()));
  }
  if (!requires_grad()) return;

  // Collect reachable nodes; ordering by creation sequence is a valid
  // reverse topological order because inputs are always created first.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack{node_.get()};
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    order.push_back(n);
    for (const auto& in : n->inputs) {
      if (in->requires_grad) stack.push_back(in.get());
    }
  }
  std::sort(order.begin(), order.end(),
            [](const Node* a, const Node* b) { return a->sequence > b->sequence; });

  node_->grad_buffer()[0] += 1.0;
  for (Node* n : order) {
    if (!n->backward) continue;
    n->grad_buffer();
    n->backward(*n);
  }
}

}  // namespace lyrnet::ad
