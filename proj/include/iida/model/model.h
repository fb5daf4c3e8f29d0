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

#ifndef IIDA_MODEL_MODEL_H_
#define IIDA_MODEL_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "iida/datastore/dataset.h"
#include "iida/nets/blocks.h"
#include "iida/numcore/parameters.h"
#include "iida/numcore/tensor.h"
#include "json.hpp"

namespace iida::model {

using data::ContextSet;
using envsim::EnvParams;
using envsim::Vec;
using numcore::Tensor;

// none = domain randomization (context ignored); explicit = conditioned on
// the true factor vector.
enum class EncoderKind { kNone, kAvg, kRnn, kTfm, kExplicit };

std::string_view EncoderName(EncoderKind kind);
EncoderKind ParseEncoder(std::string_view name);
std::vector<EncoderKind> AllEncoders();

enum class LossKind { kMse, kL2 };
std::string_view LossName(LossKind kind);
LossKind ParseLoss(std::string_view name);

using Latent = std::vector<double>;

struct ModelSpec {
  EncoderKind encoder = EncoderKind::kAvg;
  std::string family;
  int state_dim = 1;
  int action_dim = 1;
  // Factor ranges, used to map true parameters to [-1, 1] for explicit kind.
  Vec params_low;
  Vec params_high;

  int latent_dim = 8;
  std::vector<int> predictor_hidden = {256, 256};
  int avg_width = 256;
  int lstm_hidden = 256;
  int lstm_layers = 2;
  int attention_width = 120;
  int attention_heads = 5;

  int context_n = 8;  // training context size
  // Predict s' - s instead of s'.
  bool residual = true;
  LossKind loss = LossKind::kMse;

  int params_dim() const { return static_cast<int>(params_low.size()); }
  int tuple_dim() const { return 2 * state_dim + action_dim; }
  bool uses_context() const;
  // Width of the vector appended to (s, a) at the predictor input.
  int conditioning_dim() const;

  bool operator==(const ModelSpec&) const = default;
};

void Validate(const ModelSpec& spec);
ModelSpec DefaultSpec(const envsim::Family& family, EncoderKind encoder);

nlohmann::ordered_json ToJson(const ModelSpec& spec);
ModelSpec SpecFromJson(const nlohmann::json& doc);

// Per-dimension affine scaling of states, actions and regression targets.
struct Normalizer {
  Vec state_mean, state_scale;
  Vec action_mean, action_scale;
  Vec target_mean, target_scale;

  static Normalizer Identity(const ModelSpec& spec);
  // Mean and standard deviation over the transitions; scales below 1e-8 are
  // replaced by 1.
  static Normalizer Fit(const ModelSpec& spec, const std::vector<envsim::Transition>& data);

  bool operator==(const Normalizer&) const = default;
};

// Context summarizer g plus predictor f. Owns its parameters; move-only.
class Model {
 public:
  Model(ModelSpec spec, std::uint64_t seed);
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  const ModelSpec& spec() const { return spec_; }
  numcore::ParameterStore& parameters() { return store_; }
  const numcore::ParameterStore& parameters() const { return store_; }
  const Normalizer& normalizer() const { return normalizer_; }
  void set_normalizer(Normalizer normalizer);

  // Parameter names belonging to the context encoder (empty for none and
  // explicit kinds).
  std::vector<std::string> EncoderParameterNames() const;

  // [B, latent_dim]. Empty contexts map to the no-context vector (zeros).
  Tensor EncodeBatch(const std::vector<const ContextSet*>& contexts) const;
  Latent Encode(const ContextSet& context) const;

  // Row appended to (s, a): the latent, the normalized true parameters, or
  // nothing, depending on the encoder kind.
  Vec Conditioning(const ContextSet& context, const EnvParams& params) const;
  Tensor ConditioningBatch(const std::vector<const ContextSet*>& contexts,
                           const std::vector<const EnvParams*>& params) const;
  Vec NormalizedParams(const EnvParams& params) const;

  // Predictor output in normalized target units, [B, state_dim].
  Tensor ForwardNormalized(const std::vector<Vec>& states, const std::vector<Vec>& actions,
                           const Tensor& conditioning) const;
  // Raw-unit s' predictions; no graph is recorded.
  std::vector<Vec> PredictBatch(const std::vector<Vec>& states, const std::vector<Vec>& actions,
                                const Vec& conditioning) const;
  std::vector<Vec> PredictBatch(const std::vector<Vec>& states, const std::vector<Vec>& actions,
                                const Tensor& conditioning) const;
  Vec Predict(const Vec& s, const Vec& a, const Vec& conditioning) const;

  // Regression target for a transition, in normalized units.
  Vec NormalizedTarget(const envsim::Transition& t) const;

  // {"format":"iida-model","version":1,"spec":..,"normalizer":..,"params":..}
  nlohmann::ordered_json ToJson() const;
  static Model FromJson(const nlohmann::json& doc);
  void Save(const std::filesystem::path& path) const;
  static Model Load(const std::filesystem::path& path);

 private:
  Tensor ContextTensor(const std::vector<const ContextSet*>& contexts, std::size_t begin,
                       std::size_t end) const;
  Tensor EncodeGroup(const Tensor& tuples) const;
  void CheckWidths(const Vec& s, const Vec& a) const;

  ModelSpec spec_;
  Normalizer normalizer_;
  numcore::ParameterStore store_;
  nets::Mlp avg_;
  nets::Lstm rnn_;
  nets::SetAttention tfm_;
  nets::Mlp predictor_;
};

}  // namespace iida::model

#endif  // IIDA_MODEL_MODEL_H_
