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

#include "iida/nets/blocks.h"

#include <cmath>
#include <stdexcept>

#include "iida/numcore/ops.h"

namespace iida::nets {

using numcore::ShapeError;
namespace nc = numcore;

void Validate(const MLPSpec& spec) {
  bool ok = spec.input_dim >= 1 && spec.output_dim >= 1;
  for (int h : spec.hidden_dims) ok &= h >= 1;
  if (!ok) throw std::invalid_argument("MLPSpec: all dims must be >= 1");
}

void Validate(const LSTMSpec& spec) {
  if (spec.input_dim < 1 || spec.hidden_size < 1 || spec.num_layers < 1 || spec.output_dim < 1) {
    throw std::invalid_argument("LSTMSpec: dims and layer count must be >= 1");
  }
}

void Validate(const AttentionSpec& spec) {
  if (spec.input_dim < 1 || spec.model_width < 1 || spec.num_heads < 1 || spec.output_dim < 1) {
    throw std::invalid_argument("AttentionSpec: dims must be >= 1");
  }
  if (spec.model_width % spec.num_heads != 0) {
    throw std::invalid_argument("AttentionSpec: model width " + std::to_string(spec.model_width) +
                                " not divisible by " + std::to_string(spec.num_heads) + " heads");
  }
}

Linear::Linear(ParameterStore& store, const std::string& name, int in, int out, Rng& rng)
    : in_(in), out_(out) {
  weight_ = store.AddGlorot(name + ".weight", in, out, rng);
  bias_ = store.AddZeros(name + ".bias", {out});
}

Tensor Linear::Forward(const Tensor& x) const {
  if (x.rank() < 2 || x.dim(-1) != in_) {
    throw ShapeError("linear: expected last axis " + std::to_string(in_) + ", got shape " +
                     nc::ShapeString(x.shape()));
  }
  if (x.rank() == 2) return nc::Add(nc::MatMul(x, weight_), bias_);
  nc::Shape shape = x.shape();
  const int rows = static_cast<int>(x.size() / in_);
  Tensor flat = nc::Add(nc::MatMul(nc::Reshape(x, {rows, in_}), weight_), bias_);
  shape.back() = out_;
  return nc::Reshape(flat, shape);
}

Mlp::Mlp(const MLPSpec& spec, ParameterStore& store, const std::string& prefix, Rng& rng)
    : spec_(spec) {
  Validate(spec);
  int in = spec.input_dim;
  for (std::size_t i = 0; i < spec.hidden_dims.size(); ++i) {
    layers_.emplace_back(store, prefix + ".layer" + std::to_string(i), in, spec.hidden_dims[i],
                         rng);
    in = spec.hidden_dims[i];
  }
  layers_.emplace_back(store, prefix + ".out", in, spec.output_dim, rng);
}

Tensor Mlp::Forward(const Tensor& x) const {
  Tensor h = x;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    h = layers_[i].Forward(h);
    h = spec_.activation == Activation::kRelu ? nc::Relu(h) : nc::Tanh(h);
  }
  return layers_.back().Forward(h);
}

Lstm::Lstm(const LSTMSpec& spec, ParameterStore& store, const std::string& prefix, Rng& rng)
    : spec_(spec) {
  Validate(spec);
  const int h = spec.hidden_size;
  int in = spec.input_dim;
  for (int l = 0; l < spec.num_layers; ++l) {
    const std::string name = prefix + ".layer" + std::to_string(l);
    Layer layer;
    layer.input_weight = store.AddGlorot(name + ".input_weight", in, 4 * h, rng);
    layer.hidden_weight = store.AddGlorot(name + ".hidden_weight", h, 4 * h, rng);
    layer.bias = store.AddZeros(name + ".bias", {4 * h});
    layers_.push_back(layer);
    in = h;
  }
  projection_ = Linear(store, prefix + ".projection", h, spec.output_dim, rng);
}

Tensor Lstm::Forward(const Tensor& sequence) const {
  if (sequence.rank() != 3 || sequence.dim(2) != spec_.input_dim) {
    throw ShapeError("lstm: expected [batch, steps, " + std::to_string(spec_.input_dim) +
                     "], got " + nc::ShapeString(sequence.shape()));
  }
  const int batch = sequence.dim(0), steps = sequence.dim(1), h = spec_.hidden_size;
  if (steps == 0) throw std::invalid_argument("lstm: empty sequence");

  std::vector<Tensor> hidden(layers_.size(), Tensor::Zeros({batch, h}));
  std::vector<Tensor> cell(layers_.size(), Tensor::Zeros({batch, h}));
  for (int t = 0; t < steps; ++t) {
    Tensor x = nc::Reshape(nc::Narrow(sequence, 1, t, 1), {batch, spec_.input_dim});
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const Layer& layer = layers_[l];
      Tensor gates = nc::Add(
          nc::Add(nc::MatMul(x, layer.input_weight), nc::MatMul(hidden[l], layer.hidden_weight)),
          layer.bias);
      Tensor in_gate = nc::Sigmoid(nc::Narrow(gates, 1, 0, h));
      Tensor forget_gate = nc::Sigmoid(nc::Narrow(gates, 1, h, h));
      Tensor candidate = nc::Tanh(nc::Narrow(gates, 1, 2 * h, h));
      Tensor out_gate = nc::Sigmoid(nc::Narrow(gates, 1, 3 * h, h));
      cell[l] = nc::Add(nc::Mul(forget_gate, cell[l]), nc::Mul(in_gate, candidate));
      hidden[l] = nc::Mul(out_gate, nc::Tanh(cell[l]));
      x = hidden[l];
    }
  }
  return projection_.Forward(hidden.back());
}

SetAttention::SetAttention(const AttentionSpec& spec, ParameterStore& store,
                           const std::string& prefix, Rng& rng)
    : spec_(spec) {
  Validate(spec);
  const int w = spec.model_width;
  embed_ = Linear(store, prefix + ".embed", spec.input_dim, w, rng);
  query_ = Linear(store, prefix + ".query", w, w, rng);
  key_ = Linear(store, prefix + ".key", w, w, rng);
  value_ = Linear(store, prefix + ".value", w, w, rng);
  mix_ = Linear(store, prefix + ".mix", w, w, rng);
  head_ = Linear(store, prefix + ".head", w, spec.output_dim, rng);
}

Tensor SetAttention::Elements(const Tensor& set) const {
  if (set.rank() != 3 || set.dim(2) != spec_.input_dim) {
    throw ShapeError("attention: expected [batch, n, " + std::to_string(spec_.input_dim) +
                     "], got " + nc::ShapeString(set.shape()));
  }
  if (set.dim(1) == 0) throw std::invalid_argument("attention: empty set");
  const int head_width = spec_.model_width / spec_.num_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_width));

  Tensor x = embed_.Forward(set);
  Tensor q = query_.Forward(x), k = key_.Forward(x), v = value_.Forward(x);
  std::vector<Tensor> heads;
  for (int i = 0; i < spec_.num_heads; ++i) {
    const int start = i * head_width;
    Tensor qh = nc::Narrow(q, 2, start, head_width);
    Tensor kh = nc::Narrow(k, 2, start, head_width);
    Tensor vh = nc::Narrow(v, 2, start, head_width);
    Tensor weights = nc::Softmax(nc::Scale(nc::MatMul(qh, nc::Transpose(kh)), scale));
    heads.push_back(nc::MatMul(weights, vh));
  }
  return mix_.Forward(nc::Concat(heads, 2));
}

Tensor SetAttention::Forward(const Tensor& set) const {
  return head_.Forward(nc::Mean(Elements(set), 1));
}

}  // namespace iida::nets
