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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gradcheck.h"
#include "gtest/gtest.h"
#include "iida/nets/blocks.h"
#include "iida/numcore/ops.h"

namespace iida::nets {
namespace {

namespace nc = numcore;

Tensor RandomConstant(nc::Shape shape, Rng& rng) {
  std::vector<double> v(nc::NumElements(shape));
  for (double& x : v) x = Uniform(rng, -1.0, 1.0);
  return Tensor::Constant(std::move(shape), std::move(v));
}

// Non-zero biases make the gradient checks see every parameter.
void PerturbAll(ParameterStore& store, Rng& rng) {
  for (auto& t : store.tensors()) {
    for (double& v : t.mutable_values()) v += Uniform(rng, -0.3, 0.3);
  }
}

Tensor Permute(const Tensor& set, const std::vector<int>& order) {
  const int n = set.dim(1), d = set.dim(2);
  std::vector<double> v(set.size());
  for (int b = 0; b < set.dim(0); ++b) {
    for (int i = 0; i < n; ++i) {
      std::copy_n(set.values().data() + (b * n + order[i]) * d, d, v.data() + (b * n + i) * d);
    }
  }
  return Tensor::Constant(set.shape(), std::move(v));
}

TEST(Mlp, ZeroWeightsGiveZeroOutput) {
  Rng rng(1);
  ParameterStore store;
  Mlp mlp({.input_dim = 3, .hidden_dims = {4, 4}, .output_dim = 2}, store, "mlp", rng);
  for (auto& t : store.tensors())
    std::fill(t.mutable_values().begin(), t.mutable_values().end(), 0.0);
  Tensor out = mlp.Forward(RandomConstant({5, 3}, rng));
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(Mlp, RowsAreIndependent) {
  Rng rng(2);
  ParameterStore store;
  Mlp mlp({.input_dim = 3, .hidden_dims = {8}, .output_dim = 2}, store, "mlp", rng);
  Tensor x = Tensor::Constant({2, 3}, {0.1, -0.2, 0.3, 0.1, -0.2, 0.3});
  Tensor out = mlp.Forward(x);
  EXPECT_EQ(out.at(0), out.at(2));
  EXPECT_EQ(out.at(1), out.at(3));

  // Row i depends only on row i.
  Tensor y = Tensor::Constant({2, 3}, {0.1, -0.2, 0.3, 9.0, 9.0, 9.0});
  Tensor out2 = mlp.Forward(y);
  EXPECT_EQ(out.at(0), out2.at(0));
  EXPECT_EQ(out.at(1), out2.at(1));
}

TEST(Mlp, WidthMismatchThrows) {
  Rng rng(3);
  ParameterStore store;
  Mlp mlp({.input_dim = 3, .hidden_dims = {4}, .output_dim = 1}, store, "mlp", rng);
  EXPECT_THROW(mlp.Forward(Tensor::Zeros({2, 4})), nc::ShapeError);
  EXPECT_THROW(Mlp({.input_dim = 0, .hidden_dims = {}, .output_dim = 1}, store, "bad", rng),
               std::invalid_argument);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  ParameterStore store;
  Mlp mlp({.input_dim = 4, .hidden_dims = {2}, .output_dim = 1, .activation = Activation::kTanh},
          store, "mlp", rng);
  PerturbAll(store, rng);
  Tensor x = RandomConstant({6, 4}, rng), y = RandomConstant({6, 1}, rng);
  auto r = iida::testing::CheckGradients([&] { return nc::SquaredError(mlp.Forward(x), y); },
                                         store.tensors());
  EXPECT_EQ(r.passed, r.coordinates) << r.worst_relative_error;

  ParameterStore relu_store;
  Mlp relu_mlp({.input_dim = 4, .hidden_dims = {2}, .output_dim = 1}, relu_store, "mlp", rng);
  PerturbAll(relu_store, rng);
  auto r2 = iida::testing::CheckGradients([&] { return nc::SquaredError(relu_mlp.Forward(x), y); },
                                          relu_store.tensors());
  EXPECT_EQ(r2.passed, r2.coordinates) << r2.worst_relative_error;
}

TEST(Lstm, SingleStepDependsOnlyOnThatElement) {
  Rng rng(5);
  ParameterStore store;
  Lstm lstm({.input_dim = 3, .hidden_size = 4, .num_layers = 2, .output_dim = 2}, store, "lstm",
            rng);
  Tensor a = Tensor::Constant({1, 1, 3}, {0.5, -0.1, 0.2});
  Tensor batch = Tensor::Constant({2, 1, 3}, {0.5, -0.1, 0.2, -0.9, 0.4, 0.8});
  Tensor out_a = lstm.Forward(a), out_batch = lstm.Forward(batch);
  EXPECT_EQ(out_a.at(0), out_batch.at(0));
  EXPECT_EQ(out_a.at(1), out_batch.at(1));
  EXPECT_THROW(lstm.Forward(Tensor::Zeros({1, 0, 3})), std::invalid_argument);
}

TEST(Lstm, ReversedSequenceChangesOutput) {
  Rng rng(6);
  ParameterStore store;
  Lstm lstm({.input_dim = 3, .hidden_size = 5, .num_layers = 2, .output_dim = 2}, store, "lstm",
            rng);
  Tensor seq = RandomConstant({1, 4, 3}, rng);
  Tensor out = lstm.Forward(seq), rev = lstm.Forward(Permute(seq, {3, 2, 1, 0}));
  EXPECT_GT(std::abs(out.at(0) - rev.at(0)) + std::abs(out.at(1) - rev.at(1)), 1e-6);
}

TEST(Lstm, ZeroInputOutputDependsOnlyOnBiases) {
  Rng rng(7);
  ParameterStore store;
  Lstm lstm({.input_dim = 3, .hidden_size = 4, .num_layers = 1, .output_dim = 2}, store, "lstm",
            rng);
  Tensor zeros = Tensor::Zeros({1, 3, 3});
  // Zero biases and zero state: every gate pre-activation is zero, so the
  // cell stays at zero and the output is the projection bias.
  Tensor out = lstm.Forward(zeros);
  EXPECT_EQ(out.at(0), 0.0);
  EXPECT_EQ(out.at(1), 0.0);
  // Input weights are irrelevant for zero input.
  Tensor bias = store.Get("lstm.layer0.bias");
  Tensor input_weight = store.Get("lstm.layer0.input_weight");
  for (double& v : bias.mutable_values()) v = 0.2;
  Tensor a = lstm.Forward(zeros);
  for (double& v : input_weight.mutable_values()) v += 1.0;
  Tensor b = lstm.Forward(zeros);
  EXPECT_EQ(a.at(0), b.at(0));
  EXPECT_EQ(a.at(1), b.at(1));
}

TEST(Lstm, GradientMatchesFiniteDifferences) {
  for (int layers : {1, 2}) {
    Rng rng(8 + layers);
    ParameterStore store;
    Lstm lstm({.input_dim = 2, .hidden_size = 3 - layers, .num_layers = layers, .output_dim = 2},
              store, "lstm", rng);
    PerturbAll(store, rng);
    ASSERT_LE(store.TotalSize(), 64u);
    Tensor seq = RandomConstant({2, 3, 2}, rng), y = RandomConstant({2, 2}, rng);
    auto r = iida::testing::CheckGradients([&] { return nc::SquaredError(lstm.Forward(seq), y); },
                                           store.tensors());
    EXPECT_GE(r.pass_fraction(), 0.99) << r.worst_relative_error;
  }
}

TEST(SetAttention, SingleElementAttendsToItself) {
  Rng rng(9);
  ParameterStore store;
  AttentionSpec spec{.input_dim = 3, .model_width = 6, .num_heads = 2, .output_dim = 2};
  SetAttention attn(spec, store, "attn", rng);
  PerturbAll(store, rng);
  Tensor x = RandomConstant({1, 1, 3}, rng);
  // With one element the softmax weight is exactly 1, so the element output
  // is mix(value(embed(x))).
  Tensor embedded = nc::Add(nc::MatMul(nc::Reshape(x, {1, 3}), store.Get("attn.embed.weight")),
                            store.Get("attn.embed.bias"));
  Tensor value =
      nc::Add(nc::MatMul(embedded, store.Get("attn.value.weight")), store.Get("attn.value.bias"));
  Tensor mixed =
      nc::Add(nc::MatMul(value, store.Get("attn.mix.weight")), store.Get("attn.mix.bias"));
  Tensor elements = attn.Elements(x);
  for (std::size_t i = 0; i < mixed.size(); ++i) EXPECT_NEAR(elements.at(i), mixed.at(i), 1e-15);
  EXPECT_THROW(attn.Forward(Tensor::Zeros({1, 0, 3})), std::invalid_argument);
}

TEST(SetAttention, PooledOutputIsPermutationInvariant) {
  Rng rng(10);
  ParameterStore store;
  SetAttention attn({.input_dim = 4, .model_width = 120, .num_heads = 5, .output_dim = 8}, store,
                    "attn", rng);
  PerturbAll(store, rng);
  Tensor set = RandomConstant({1, 5, 4}, rng);
  std::vector<int> order = {0, 1, 2, 3, 4};
  Tensor base = attn.Forward(set);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    Tensor out = attn.Forward(Permute(set, order));
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_NEAR(out.at(i), base.at(i), 1e-9 * std::max(1.0, std::abs(base.at(i))));
    }
  }
}

TEST(SetAttention, RejectsIndivisibleWidth) {
  Rng rng(11);
  ParameterStore store;
  EXPECT_THROW(SetAttention({.input_dim = 2, .model_width = 10, .num_heads = 3, .output_dim = 1},
                            store, "a", rng),
               std::invalid_argument);
}

TEST(SetAttention, GradientMatchesFiniteDifferences) {
  Rng rng(12);
  ParameterStore store;
  SetAttention attn({.input_dim = 2, .model_width = 2, .num_heads = 2, .output_dim = 2}, store,
                    "attn", rng);
  PerturbAll(store, rng);
  ASSERT_LE(store.TotalSize(), 64u);
  Tensor set = RandomConstant({2, 3, 2}, rng), y = RandomConstant({2, 2}, rng);
  auto r = iida::testing::CheckGradients([&] { return nc::SquaredError(attn.Forward(set), y); },
                                         store.tensors());
  EXPECT_GE(r.pass_fraction(), 0.99) << r.worst_relative_error;
}

}  // namespace
}  // namespace iida::nets
