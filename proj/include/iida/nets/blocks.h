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

#ifndef IIDA_NETS_BLOCKS_H_
#define IIDA_NETS_BLOCKS_H_

#include <string>
#include <vector>

#include "iida/common/random.h"
#include "iida/numcore/parameters.h"
#include "iida/numcore/tensor.h"

namespace iida::nets {

using numcore::ParameterStore;
using numcore::Tensor;

enum class Activation { kRelu, kTanh };

struct MLPSpec {
  int input_dim = 1;
  std::vector<int> hidden_dims = {256, 256};
  int output_dim = 1;
  Activation activation = Activation::kRelu;
};

struct LSTMSpec {
  int input_dim = 1;
  int hidden_size = 256;
  int num_layers = 2;
  int output_dim = 8;
};

struct AttentionSpec {
  int input_dim = 1;
  int model_width = 120;
  int num_heads = 5;
  int output_dim = 8;
};

void Validate(const MLPSpec& spec);
void Validate(const LSTMSpec& spec);
void Validate(const AttentionSpec& spec);

// Affine map applied over the last axis of a rank-2 or rank-3 input.
class Linear {
 public:
  Linear() = default;
  Linear(ParameterStore& store, const std::string& name, int in, int out, Rng& rng);

  Tensor Forward(const Tensor& x) const;
  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  const Tensor& weight() const { return weight_; }
  const Tensor& bias() const { return bias_; }

 private:
  int in_ = 0, out_ = 0;
  Tensor weight_, bias_;
};

// Feed-forward stack: hidden layers with the spec's activation, linear output.
class Mlp {
 public:
  Mlp() = default;
  Mlp(const MLPSpec& spec, ParameterStore& store, const std::string& prefix, Rng& rng);

  // x: [batch, input_dim] or [batch, n, input_dim].
  Tensor Forward(const Tensor& x) const;
  const MLPSpec& spec() const { return spec_; }
  const std::vector<Linear>& layers() const { return layers_; }

 private:
  MLPSpec spec_;
  std::vector<Linear> layers_;
};

// Stacked LSTM over [batch, steps, input_dim] with zero initial state. The
// top layer's last hidden state goes through a linear projection.
class Lstm {
 public:
  Lstm() = default;
  Lstm(const LSTMSpec& spec, ParameterStore& store, const std::string& prefix, Rng& rng);

  Tensor Forward(const Tensor& sequence) const;
  const LSTMSpec& spec() const { return spec_; }

 private:
  struct Layer {
    Tensor input_weight;   // [in, 4H], gate order i, f, g, o
    Tensor hidden_weight;  // [H, 4H]
    Tensor bias;           // [4H]
  };
  LSTMSpec spec_;
  std::vector<Layer> layers_;
  Linear projection_;
};

// One multi-head self-attention layer with no positional encoding. Inputs
// are embedded to model_width, attended per head, recombined by an output
// projection, then mean-pooled over the set and mapped to output_dim.
class SetAttention {
 public:
  SetAttention() = default;
  SetAttention(const AttentionSpec& spec, ParameterStore& store, const std::string& prefix,
               Rng& rng);

  // [batch, n, input_dim] -> [batch, n, model_width]
  Tensor Elements(const Tensor& set) const;
  // [batch, n, input_dim] -> [batch, output_dim]
  Tensor Forward(const Tensor& set) const;
  const AttentionSpec& spec() const { return spec_; }

 private:
  AttentionSpec spec_;
  Linear embed_, query_, key_, value_, mix_, head_;
};

}  // namespace iida::nets

#endif  // IIDA_NETS_BLOCKS_H_
