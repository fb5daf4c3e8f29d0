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

#ifndef IIDA_NUMCORE_OPS_H_
#define IIDA_NUMCORE_OPS_H_

#include <vector>

#include "iida/numcore/tensor.h"

// The differentiable op vocabulary. Every op records itself on the graph and
// throws ShapeError naming the op and operand shapes on mismatch.
namespace iida::numcore {

// [m,k]x[k,n] -> [m,n], or batched [b,m,k]x[b,k,n] -> [b,m,n].
Tensor MatMul(const Tensor& a, const Tensor& b);

// Swaps the last two axes of a rank-2 or rank-3 tensor.
Tensor Transpose(const Tensor& x);

// Elementwise. `b` may equal `a` in shape or match a trailing suffix of it
// (broadcast over leading axes, e.g. a bias row).
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& x, double factor);

Tensor Concat(const std::vector<Tensor>& parts, int axis = -1);
Tensor Narrow(const Tensor& x, int axis, int start, int length);
Tensor Reshape(const Tensor& x, Shape shape);

// Mean over one axis; the axis is removed.
Tensor Mean(const Tensor& x, int axis);

Tensor Relu(const Tensor& x);
Tensor Tanh(const Tensor& x);
Tensor Sigmoid(const Tensor& x);
Tensor Softmax(const Tensor& x);  // over the last axis

// Mean of squared differences over all entries (scalar).
Tensor SquaredError(const Tensor& prediction, const Tensor& target);
// Mean over rows of the Euclidean norm of the last-axis residual (scalar).
Tensor MeanResidualNorm(const Tensor& prediction, const Tensor& target);

}  // namespace iida::numcore

#endif  // IIDA_NUMCORE_OPS_H_
