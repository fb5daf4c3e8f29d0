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

#include "iida/numcore/tensor.h"

#include <cmath>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace iida::numcore {

std::size_t NumElements(const Shape& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw ShapeError("negative dimension in " + ShapeString(shape));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string ShapeString(const Shape& shape) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ", ";
    out << shape[i];
  }
  out << "]";
  return out.str();
}

namespace {

std::shared_ptr<internal::Node> MakeLeaf(Shape shape, std::vector<double> values,
                                         bool requires_grad) {
  if (values.size() != NumElements(shape)) {
    throw ShapeError("tensor: " + std::to_string(values.size()) + " values for shape " +
                     ShapeString(shape));
  }
  auto node = std::make_shared<internal::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  node->op = requires_grad ? "parameter" : "constant";
  return node;
}

const std::shared_ptr<internal::Node>& Checked(const std::shared_ptr<internal::Node>& node) {
  if (!node) throw std::logic_error("use of an undefined tensor");
  return node;
}

}  // namespace

Tensor Tensor::Constant(Shape shape, std::vector<double> values) {
  return Tensor(MakeLeaf(std::move(shape), std::move(values), false));
}

Tensor Tensor::Zeros(Shape shape) {
  std::size_t n = NumElements(shape);
  return Constant(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::Scalar(double value) { return Constant({}, {value}); }

Tensor Tensor::Parameter(Shape shape, std::vector<double> values) {
  return Tensor(MakeLeaf(std::move(shape), std::move(values), true));
}

const Shape& Tensor::shape() const { return Checked(node_)->shape; }

int Tensor::dim(int axis) const {
  const Shape& s = shape();
  int r = static_cast<int>(s.size());
  int a = axis < 0 ? axis + r : axis;
  if (a < 0 || a >= r) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for " + ShapeString(s));
  }
  return s[a];
}

std::size_t Tensor::size() const { return Checked(node_)->value.size(); }

std::span<const double> Tensor::values() const { return Checked(node_)->value; }

std::span<double> Tensor::mutable_values() { return Checked(node_)->value; }

double Tensor::item() const {
  if (size() != 1) {
    throw ShapeError("item() on tensor of shape " + ShapeString(shape()));
  }
  return node_->value[0];
}

std::span<const double> Tensor::grad() const { return Checked(node_)->grad; }

bool Tensor::has_grad() const { return !Checked(node_)->grad.empty(); }

void Tensor::ZeroGrad() {
  auto& n = *Checked(node_);
  n.grad.assign(n.value.size(), 0.0);
}

bool Tensor::requires_grad() const { return Checked(node_)->requires_grad; }

const std::string& Tensor::op() const { return Checked(node_)->op; }

std::uintptr_t Tensor::id() const { return reinterpret_cast<std::uintptr_t>(Checked(node_).get()); }

Tensor Tensor::Detach() const { return Constant(shape(), Checked(node_)->value); }

namespace {
thread_local bool grad_enabled = true;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }
NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }
bool GradEnabled() { return grad_enabled; }

void Backward(const Tensor& loss) {
  const auto& root = Checked(loss.node());
  if (root->value.size() != 1) {
    throw ShapeError("backward: loss must be scalar, got shape " + ShapeString(root->shape));
  }
  if (!root->requires_grad) return;

  // Iterative DFS post-order; a grey node seen again means a cycle.
  enum class Mark { kGrey, kBlack };
  std::unordered_map<internal::Node*, Mark> marks;
  std::vector<internal::Node*> order;
  std::vector<std::pair<internal::Node*, std::size_t>> stack;
  stack.emplace_back(root.get(), 0);
  marks[root.get()] = Mark::kGrey;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      internal::Node* child = node->inputs[next++].get();
      if (!child->requires_grad) continue;
      auto it = marks.find(child);
      if (it == marks.end()) {
        marks[child] = Mark::kGrey;
        stack.emplace_back(child, 0);
      } else if (it->second == Mark::kGrey) {
        throw std::logic_error("backward: cycle in computation graph at op '" + child->op + "'");
      }
    } else {
      marks[node] = Mark::kBlack;
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (internal::Node* node : order) {
    if (!node->is_leaf) node->grad.assign(node->value.size(), 0.0);
  }
  root->EnsureGrad();
  root->grad[0] += 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    internal::Node* node = *it;
    if (node->is_leaf || !node->backward) continue;
    node->backward(*node);
  }

  for (internal::Node* node : order) {
    if (!node->is_leaf) continue;
    for (double g : node->grad) {
      if (!std::isfinite(g)) {
        throw NumericError("backward: non-finite gradient reached a parameter");
      }
    }
  }
}

}  // namespace iida::numcore
