// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lyrnet::ad {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

struct Node;

/// Propagates `self.grad` into the gradients of `self.inputs`.
using BackwardFn = std::function<void(Node& self)>;

/// One recorded operation result. Tensors are handles onto nodes; the graph
/// formed by `inputs` is the computation tape for reverse-mode
/// differentiation.
struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until a backward pass reaches the node
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  BackwardFn backward;
  std::string op;
  std::uint64_t sequence = 0;  // creation order; inputs always have smaller values

  /// Gradient buffer, allocated zeroed on first use.
  std::span<double> grad_buffer();
};

/// Dense row-major tensor of doubles with an optional gradient slot.
///
/// Copies share the underlying node. Data is treated as immutable once an
/// operation has consumed it; parameters are the exception and are updated
/// in place by the optimizer between steps.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> data, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  /// Builds an operation result. Used by primitives and by callers that need
  /// a custom differentiable op; `backward` may be empty for constants.
  static Tensor make_result(Shape shape, std::vector<double> data,
                            std::vector<Tensor> inputs, BackwardFn backward,
                            std::string op);

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const;

  std::span<const double> data() const;
  /// Writable view; only for leaves (parameters, inputs under test).
  std::span<double> mutable_data();
  double item() const;
  double at(std::size_t flat_index) const { return data()[flat_index]; }

  bool requires_grad() const;
  void set_requires_grad(bool value);
  bool has_grad() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();

  const std::string& op() const;

  /// Same values, no history, no gradient.
  Tensor detach() const;
  /// Deep copy of values with fresh identity (same requires_grad).
  Tensor clone() const;

  /// Reverse-mode pass from a scalar output. Gradients accumulate additively
  /// into every reachable node that requires them; callers zero leaves
  /// between steps.
  void backward() const;

  std::shared_ptr<Node> node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}
  std::shared_ptr<Node> node_;
};

}  // namespace lyrnet::ad
