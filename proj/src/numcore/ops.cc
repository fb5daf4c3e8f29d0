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

#include "iida/numcore/ops.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace iida::numcore {
namespace {

using internal::Node;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

[[noreturn]] void Mismatch(const std::string& op, const Tensor& a, const Tensor& b) {
  throw ShapeError(op + ": incompatible shapes " + ShapeString(a.shape()) + " and " +
                   ShapeString(b.shape()));
}

[[noreturn]] void BadShape(const std::string& op, const Tensor& x, const std::string& what) {
  throw ShapeError(op + ": " + what + ", got shape " + ShapeString(x.shape()));
}

Tensor MakeOp(const char* op, Shape shape, std::vector<double> value,
              const std::vector<Tensor>& inputs, std::function<void(Node&)> backward) {
  for (double v : value) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string(op) + ": non-finite value in forward pass");
    }
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->op = op;
  node->is_leaf = false;
  if (GradEnabled()) {
    for (const Tensor& t : inputs) node->requires_grad |= t.requires_grad();
  }
  if (node->requires_grad) {
    for (const Tensor& t : inputs) node->inputs.push_back(t.node());
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

// Grad buffer of an input, or nullptr if it does not participate.
std::vector<double>* GradOf(Node& self, std::size_t i) {
  Node& in = *self.inputs[i];
  return in.requires_grad ? &in.EnsureGrad() : nullptr;
}

bool IsSuffix(const Shape& full, const Shape& suffix) {
  if (suffix.size() > full.size()) return false;
  return std::equal(suffix.rbegin(), suffix.rend(), full.rbegin());
}

int NormalizeAxis(const std::string& op, const Tensor& x, int axis) {
  int r = x.rank();
  int a = axis < 0 ? axis + r : axis;
  if (a < 0 || a >= r) BadShape(op, x, "axis " + std::to_string(axis) + " out of range");
  return a;
}

// Sizes before, at, and after `axis`.
struct AxisSplit {
  std::size_t outer = 1, dim = 1, inner = 1;
};

AxisSplit SplitAt(const Shape& s, int axis) {
  AxisSplit r;
  for (int i = 0; i < axis; ++i) r.outer *= s[i];
  r.dim = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

enum class Arith { kAdd, kSub, kMul };

Tensor Elementwise(const char* op, Arith kind, const Tensor& a, const Tensor& b) {
  if (!IsSuffix(a.shape(), b.shape())) Mismatch(op, a, b);
  const std::size_t n = a.size(), m = b.size();
  if (m == 0) Mismatch(op, a, b);
  auto av = a.values(), bv = b.values();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = av[i], y = bv[i % m];
    out[i] = kind == Arith::kAdd ? x + y : kind == Arith::kSub ? x - y : x * y;
  }
  return MakeOp(op, a.shape(), std::move(out), {a, b}, [kind, n, m](Node& self) {
    const auto& g = self.grad;
    const auto& x = self.inputs[0]->value;
    const auto& y = self.inputs[1]->value;
    if (auto* ga = GradOf(self, 0)) {
      for (std::size_t i = 0; i < n; ++i) {
        (*ga)[i] += kind == Arith::kMul ? g[i] * y[i % m] : g[i];
      }
    }
    if (auto* gb = GradOf(self, 1)) {
      for (std::size_t i = 0; i < n; ++i) {
        double d = kind == Arith::kAdd ? g[i] : kind == Arith::kSub ? -g[i] : g[i] * x[i];
        (*gb)[i % m] += d;
      }
    }
  });
}

template <typename F, typename DF>
Tensor Unary(const char* op, const Tensor& x, F f, DF df_from_output) {
  auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = f(xv[i]);
  return MakeOp(op, x.shape(), std::move(out), {x}, [df_from_output](Node& self) {
    if (auto* gx = GradOf(self, 0)) {
      const auto& in = self.inputs[0]->value;
      for (std::size_t i = 0; i < self.grad.size(); ++i) {
        (*gx)[i] += self.grad[i] * df_from_output(in[i], self.value[i]);
      }
    }
  });
}

}  // namespace

Tensor MatMul(const Tensor& a, const Tensor& b) {
  const char* op = "matmul";
  if (a.rank() == 2 && b.rank() == 2) {
    const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
    if (b.dim(0) != k) Mismatch(op, a, b);
    std::vector<double> out(static_cast<std::size_t>(m) * n);
    MutMap(out.data(), m, n).noalias() =
        ConstMap(a.values().data(), m, k) * ConstMap(b.values().data(), k, n);
    return MakeOp(op, {m, n}, std::move(out), {a, b}, [m, k, n](Node& self) {
      ConstMap g(self.grad.data(), m, n);
      if (auto* ga = GradOf(self, 0)) {
        MutMap(ga->data(), m, k).noalias() +=
            g * ConstMap(self.inputs[1]->value.data(), k, n).transpose();
      }
      if (auto* gb = GradOf(self, 1)) {
        MutMap(gb->data(), k, n).noalias() +=
            ConstMap(self.inputs[0]->value.data(), m, k).transpose() * g;
      }
    });
  }
  if (a.rank() == 3 && b.rank() == 3) {
    const int batch = a.dim(0), m = a.dim(1), k = a.dim(2), n = b.dim(2);
    if (b.dim(0) != batch || b.dim(1) != k) Mismatch(op, a, b);
    const std::size_t sa = static_cast<std::size_t>(m) * k;
    const std::size_t sb = static_cast<std::size_t>(k) * n;
    const std::size_t sc = static_cast<std::size_t>(m) * n;
    std::vector<double> out(batch * sc);
    for (int i = 0; i < batch; ++i) {
      MutMap(out.data() + i * sc, m, n).noalias() =
          ConstMap(a.values().data() + i * sa, m, k) * ConstMap(b.values().data() + i * sb, k, n);
    }
    return MakeOp(op, {batch, m, n}, std::move(out), {a, b}, [=](Node& self) {
      auto* ga = GradOf(self, 0);
      auto* gb = GradOf(self, 1);
      for (int i = 0; i < batch; ++i) {
        ConstMap g(self.grad.data() + i * sc, m, n);
        if (ga) {
          MutMap(ga->data() + i * sa, m, k).noalias() +=
              g * ConstMap(self.inputs[1]->value.data() + i * sb, k, n).transpose();
        }
        if (gb) {
          MutMap(gb->data() + i * sb, k, n).noalias() +=
              ConstMap(self.inputs[0]->value.data() + i * sa, m, k).transpose() * g;
        }
      }
    });
  }
  Mismatch(op, a, b);
}

Tensor Transpose(const Tensor& x) {
  if (x.rank() != 2 && x.rank() != 3) BadShape("transpose", x, "expected rank 2 or 3");
  const int batch = x.rank() == 3 ? x.dim(0) : 1;
  const int m = x.dim(-2), n = x.dim(-1);
  const std::size_t s = static_cast<std::size_t>(m) * n;
  std::vector<double> out(x.size());
  auto xv = x.values();
  for (int b = 0; b < batch; ++b) {
    MutMap(out.data() + b * s, n, m) = ConstMap(xv.data() + b * s, m, n).transpose();
  }
  Shape shape = x.shape();
  std::swap(shape[shape.size() - 1], shape[shape.size() - 2]);
  return MakeOp("transpose", shape, std::move(out), {x}, [=](Node& self) {
    if (auto* gx = GradOf(self, 0)) {
      for (int b = 0; b < batch; ++b) {
        MutMap(gx->data() + b * s, m, n) += ConstMap(self.grad.data() + b * s, n, m).transpose();
      }
    }
  });
}

Tensor Add(const Tensor& a, const Tensor& b) { return Elementwise("add", Arith::kAdd, a, b); }
Tensor Sub(const Tensor& a, const Tensor& b) { return Elementwise("sub", Arith::kSub, a, b); }
Tensor Mul(const Tensor& a, const Tensor& b) { return Elementwise("mul", Arith::kMul, a, b); }

Tensor Scale(const Tensor& x, double factor) {
  return Unary(
      "scale", x, [factor](double v) { return v * factor; },
      [factor](double, double) { return factor; });
}

Tensor Concat(const std::vector<Tensor>& parts, int axis) {
  const char* op = "concat";
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Tensor& first = parts.front();
  const int a = NormalizeAxis(op, first, axis);
  Shape shape = first.shape();
  shape[a] = 0;
  std::vector<std::size_t> widths;
  for (const Tensor& p : parts) {
    if (p.rank() != first.rank()) Mismatch(op, first, p);
    for (int i = 0; i < first.rank(); ++i) {
      if (i != a && p.dim(i) != first.dim(i)) Mismatch(op, first, p);
    }
    shape[a] += p.dim(a);
  }
  const AxisSplit split = SplitAt(shape, a);
  for (const Tensor& p : parts) widths.push_back(static_cast<std::size_t>(p.dim(a)) * split.inner);
  const std::size_t row = split.dim * split.inner;
  std::vector<double> out(split.outer * row);
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    auto v = parts[p].values();
    for (std::size_t o = 0; o < split.outer; ++o) {
      std::copy_n(v.data() + o * widths[p], widths[p], out.data() + o * row + offset);
    }
    offset += widths[p];
  }
  return MakeOp(op, shape, std::move(out), parts, [widths, split, row](Node& self) {
    std::size_t off = 0;
    for (std::size_t p = 0; p < widths.size(); ++p) {
      if (auto* gp = GradOf(self, p)) {
        for (std::size_t o = 0; o < split.outer; ++o) {
          for (std::size_t j = 0; j < widths[p]; ++j) {
            (*gp)[o * widths[p] + j] += self.grad[o * row + off + j];
          }
        }
      }
      off += widths[p];
    }
  });
}

Tensor Narrow(const Tensor& x, int axis, int start, int length) {
  const char* op = "narrow";
  const int a = NormalizeAxis(op, x, axis);
  if (start < 0 || length < 0 || start + length > x.dim(a)) {
    BadShape(op, x,
             "range [" + std::to_string(start) + ", " + std::to_string(start + length) +
                 ") on axis " + std::to_string(a));
  }
  const AxisSplit split = SplitAt(x.shape(), a);
  const std::size_t in_row = split.dim * split.inner;
  const std::size_t out_row = static_cast<std::size_t>(length) * split.inner;
  const std::size_t off = static_cast<std::size_t>(start) * split.inner;
  std::vector<double> out(split.outer * out_row);
  auto xv = x.values();
  for (std::size_t o = 0; o < split.outer; ++o) {
    std::copy_n(xv.data() + o * in_row + off, out_row, out.data() + o * out_row);
  }
  Shape shape = x.shape();
  shape[a] = length;
  return MakeOp(op, shape, std::move(out), {x}, [=](Node& self) {
    if (auto* gx = GradOf(self, 0)) {
      for (std::size_t o = 0; o < split.outer; ++o) {
        for (std::size_t j = 0; j < out_row; ++j) {
          (*gx)[o * in_row + off + j] += self.grad[o * out_row + j];
        }
      }
    }
  });
}

Tensor Reshape(const Tensor& x, Shape shape) {
  if (NumElements(shape) != x.size()) {
    throw ShapeError("reshape: cannot view " + ShapeString(x.shape()) + " as " +
                     ShapeString(shape));
  }
  std::vector<double> out(x.values().begin(), x.values().end());
  return MakeOp("reshape", std::move(shape), std::move(out), {x}, [](Node& self) {
    if (auto* gx = GradOf(self, 0)) {
      for (std::size_t i = 0; i < self.grad.size(); ++i) (*gx)[i] += self.grad[i];
    }
  });
}

Tensor Mean(const Tensor& x, int axis) {
  const char* op = "mean";
  const int a = NormalizeAxis(op, x, axis);
  const AxisSplit split = SplitAt(x.shape(), a);
  if (split.dim == 0) BadShape(op, x, "mean over an empty axis");
  const double count = static_cast<double>(split.dim);
  std::vector<double> out(split.outer * split.inner, 0.0);
  auto xv = x.values();
  for (std::size_t o = 0; o < split.outer; ++o) {
    for (std::size_t j = 0; j < split.dim; ++j) {
      const double* src = xv.data() + (o * split.dim + j) * split.inner;
      for (std::size_t i = 0; i < split.inner; ++i) out[o * split.inner + i] += src[i];
    }
  }
  for (double& v : out) v /= count;
  Shape shape = x.shape();
  shape.erase(shape.begin() + a);
  return MakeOp(op, shape, std::move(out), {x}, [split, count](Node& self) {
    if (auto* gx = GradOf(self, 0)) {
      for (std::size_t o = 0; o < split.outer; ++o) {
        for (std::size_t j = 0; j < split.dim; ++j) {
          for (std::size_t i = 0; i < split.inner; ++i) {
            (*gx)[(o * split.dim + j) * split.inner + i] += self.grad[o * split.inner + i] / count;
          }
        }
      }
    }
  });
}

Tensor Relu(const Tensor& x) {
  return Unary(
      "relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double in, double) { return in > 0.0 ? 1.0 : 0.0; });
}

Tensor Tanh(const Tensor& x) {
  return Unary(
      "tanh", x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor Sigmoid(const Tensor& x) {
  return Unary(
      "sigmoid", x,
      [](double v) {
        return v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Softmax(const Tensor& x) {
  const char* op = "softmax";
  if (x.rank() == 0 || x.dim(-1) == 0) BadShape(op, x, "needs a non-empty last axis");
  const std::size_t width = x.dim(-1);
  const std::size_t rows = x.size() / width;
  auto xv = x.values();
  std::vector<double> out(x.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xv.data() + r * width;
    double* y = out.data() + r * width;
    const double peak = *std::max_element(in, in + width);
    double total = 0.0;
    for (std::size_t i = 0; i < width; ++i) total += (y[i] = std::exp(in[i] - peak));
    for (std::size_t i = 0; i < width; ++i) y[i] /= total;
  }
  return MakeOp(op, x.shape(), std::move(out), {x}, [rows, width](Node& self) {
    if (auto* gx = GradOf(self, 0)) {
      for (std::size_t r = 0; r < rows; ++r) {
        const double* y = self.value.data() + r * width;
        const double* g = self.grad.data() + r * width;
        double dot = 0.0;
        for (std::size_t i = 0; i < width; ++i) dot += g[i] * y[i];
        for (std::size_t i = 0; i < width; ++i) (*gx)[r * width + i] += y[i] * (g[i] - dot);
      }
    }
  });
}

Tensor SquaredError(const Tensor& prediction, const Tensor& target) {
  const char* op = "squared_error";
  if (prediction.shape() != target.shape()) Mismatch(op, prediction, target);
  const std::size_t n = prediction.size();
  if (n == 0) Mismatch(op, prediction, target);
  auto p = prediction.values(), t = target.values();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += (p[i] - t[i]) * (p[i] - t[i]);
  return MakeOp(op, {}, {total / static_cast<double>(n)}, {prediction, target}, [n](Node& self) {
    const double g = self.grad[0] * 2.0 / static_cast<double>(n);
    const auto& p = self.inputs[0]->value;
    const auto& t = self.inputs[1]->value;
    auto* gp = GradOf(self, 0);
    auto* gt = GradOf(self, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = g * (p[i] - t[i]);
      if (gp) (*gp)[i] += d;
      if (gt) (*gt)[i] -= d;
    }
  });
}

Tensor MeanResidualNorm(const Tensor& prediction, const Tensor& target) {
  const char* op = "mean_residual_norm";
  if (prediction.shape() != target.shape() || prediction.rank() == 0) {
    Mismatch(op, prediction, target);
  }
  const std::size_t width = prediction.dim(-1);
  const std::size_t rows = prediction.size() / width;
  if (rows == 0 || width == 0) Mismatch(op, prediction, target);
  auto p = prediction.values(), t = target.values();
  std::vector<double> norms(rows, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double ss = 0.0;
    for (std::size_t i = 0; i < width; ++i) {
      const double d = p[r * width + i] - t[r * width + i];
      ss += d * d;
    }
    norms[r] = std::sqrt(ss);
    total += norms[r];
  }
  return MakeOp(op, {}, {total / static_cast<double>(rows)}, {prediction, target},
                [rows, width, norms](Node& self) {
                  const double g = self.grad[0] / static_cast<double>(rows);
                  const auto& p = self.inputs[0]->value;
                  const auto& t = self.inputs[1]->value;
                  auto* gp = GradOf(self, 0);
                  auto* gt = GradOf(self, 1);
                  for (std::size_t r = 0; r < rows; ++r) {
                    if (norms[r] == 0.0) continue;
                    for (std::size_t i = 0; i < width; ++i) {
                      const std::size_t k = r * width + i;
                      const double d = g * (p[k] - t[k]) / norms[r];
                      if (gp) (*gp)[k] += d;
                      if (gt) (*gt)[k] -= d;
                    }
                  }
                });
}

}  // namespace iida::numcore
