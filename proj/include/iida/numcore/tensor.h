// Copyright 2026 The IIDA Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IIDA_NUMCORE_TENSOR_H_
#define IIDA_NUMCORE_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iida::numcore {

using Shape = std::vector<int>;

// Thrown for incompatible operand shapes; the message names the op and shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a forward or backward pass produces NaN or Inf.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::size_t NumElements(const Shape& shape);
std::string ShapeString(const Shape& shape);

namespace internal {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until backward touches the node
  bool requires_grad = false;
  bool is_leaf = true;
  std::string op;
  std::vector<std::shared_ptr<Node>> inputs;
  // Accumulates this node's grad into the grads of its inputs.
  std::function<void(Node&)> backward;

  std::vector<double>& EnsureGrad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace internal

// Handle to a node of a define-by-run computation graph. Copies share the
// node. Row-major, 64-bit values.
class Tensor {
 public:
  Tensor() = default;

  static Tensor Constant(Shape shape, std::vector<double> values);
  static Tensor Zeros(Shape shape);
  static Tensor Scalar(double value);
  // Leaf that accumulates gradients.
  static Tensor Parameter(Shape shape, std::vector<double> values);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  int rank() const { return static_cast<int>(shape().size()); }
  // Negative axes count from the back.
  int dim(int axis) const;
  std::size_t size() const;

  std::span<const double> values() const;
  std::span<double> mutable_values();
  double item() const;
  double at(std::size_t flat_index) const { return values()[flat_index]; }

  // Empty span if no gradient has been accumulated.
  std::span<const double> grad() const;
  bool has_grad() const;
  void ZeroGrad();

  bool requires_grad() const;
  const std::string& op() const;
  // Identity of the underlying node within a graph.
  std::uintptr_t id() const;

  // Detached copy of the values (no graph history).
  Tensor Detach() const;

  // Internal: used by op implementations.
  explicit Tensor(std::shared_ptr<internal::Node> node) : node_(std::move(node)) {}
  const std::shared_ptr<internal::Node>& node() const { return node_; }

 private:
  std::shared_ptr<internal::Node> node_;
};

// While alive on this thread, ops record no graph history (inference mode).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool GradEnabled();

// Reverse-mode pass from a single-element loss. Leaves accumulate into their
// grad buffers; interior grads are reset first. Throws on a non-scalar loss,
// a cycle, or a non-finite gradient.
void Backward(const Tensor& loss);

}  // namespace iida::numcore

#endif  // IIDA_NUMCORE_TENSOR_H_
