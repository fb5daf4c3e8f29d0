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

#include "iida/model/model.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "iida/numcore/ops.h"

namespace iida::model {
namespace {

using numcore::Shape;

constexpr std::string_view kEncoderNames[] = {"none", "avg", "rnn", "tfm", "explicit"};

void CheckWidth(const char* what, std::size_t got, int want) {
  if (got != static_cast<std::size_t>(want)) {
    throw std::invalid_argument(std::string(what) + " width " + std::to_string(got) +
                                " does not match model width " + std::to_string(want));
  }
}

Vec Affine(const Vec& x, const Vec& mean, const Vec& scale) {
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / scale[i];
  return out;
}

void MeanScale(const std::vector<Vec>& rows, std::size_t width, Vec& mean, Vec& scale) {
  mean.assign(width, 0.0);
  scale.assign(width, 1.0);
  if (rows.empty()) return;
  for (const Vec& r : rows) {
    for (std::size_t i = 0; i < width; ++i) mean[i] += r[i];
  }
  for (double& m : mean) m /= static_cast<double>(rows.size());
  Vec var(width, 0.0);
  for (const Vec& r : rows) {
    for (std::size_t i = 0; i < width; ++i) var[i] += (r[i] - mean[i]) * (r[i] - mean[i]);
  }
  for (std::size_t i = 0; i < width; ++i) {
    const double sd = std::sqrt(var[i] / static_cast<double>(rows.size()));
    scale[i] = sd < 1e-8 ? 1.0 : sd;
  }
}

Vec RawTarget(const ModelSpec& spec, const envsim::Transition& t) {
  if (!spec.residual) return t.s_next;
  Vec d(t.s.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = t.s_next[i] - t.s[i];
  return d;
}

}  // namespace

std::string_view EncoderName(EncoderKind kind) { return kEncoderNames[static_cast<int>(kind)]; }

EncoderKind ParseEncoder(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (kEncoderNames[i] == name) return static_cast<EncoderKind>(i);
  }
  throw std::invalid_argument("unknown encoder '" + std::string(name) +
                              "'; valid encoders: none, avg, rnn, tfm, explicit");
}

std::vector<EncoderKind> AllEncoders() {
  return {EncoderKind::kNone, EncoderKind::kAvg, EncoderKind::kRnn, EncoderKind::kTfm,
          EncoderKind::kExplicit};
}

std::string_view LossName(LossKind kind) { return kind == LossKind::kMse ? "mse" : "l2"; }

LossKind ParseLoss(std::string_view name) {
  if (name == "mse") return LossKind::kMse;
  if (name == "l2") return LossKind::kL2;
  throw std::invalid_argument("unknown loss '" + std::string(name) + "'; valid: mse, l2");
}

bool ModelSpec::uses_context() const {
  return encoder == EncoderKind::kAvg || encoder == EncoderKind::kRnn ||
         encoder == EncoderKind::kTfm;
}

int ModelSpec::conditioning_dim() const {
  if (uses_context()) return latent_dim;
  return encoder == EncoderKind::kExplicit ? params_dim() : 0;
}

void Validate(const ModelSpec& spec) {
  if (spec.state_dim <= 0 || spec.action_dim <= 0) {
    throw std::invalid_argument("model spec: state and action widths must be positive");
  }
  if (spec.latent_dim <= 0) throw std::invalid_argument("model spec: latent_dim must be positive");
  if (spec.context_n < 0) throw std::invalid_argument("model spec: context_n must be >= 0");
  if (spec.params_low.size() != spec.params_high.size()) {
    throw std::invalid_argument("model spec: params_low and params_high differ in width");
  }
  for (std::size_t i = 0; i < spec.params_low.size(); ++i) {
    if (!(spec.params_low[i] < spec.params_high[i])) {
      throw std::invalid_argument("model spec: empty parameter range at index " +
                                  std::to_string(i));
    }
  }
  if (spec.encoder == EncoderKind::kExplicit && spec.params_dim() == 0) {
    throw std::invalid_argument("model spec: explicit encoder requires parameter ranges");
  }
}

ModelSpec DefaultSpec(const envsim::Family& family, EncoderKind encoder) {
  ModelSpec spec;
  spec.encoder = encoder;
  spec.family = std::string(family.name());
  spec.state_dim = family.state_width();
  spec.action_dim = family.action_width();
  for (const auto& f : family.factors()) {
    spec.params_low.push_back(f.low);
    spec.params_high.push_back(f.high);
  }
  return spec;
}

nlohmann::ordered_json ToJson(const ModelSpec& spec) {
  nlohmann::ordered_json j;
  j["encoder"] = EncoderName(spec.encoder);
  j["family"] = spec.family;
  j["state_dim"] = spec.state_dim;
  j["action_dim"] = spec.action_dim;
  j["params_low"] = spec.params_low;
  j["params_high"] = spec.params_high;
  j["latent_dim"] = spec.latent_dim;
  j["predictor_hidden"] = spec.predictor_hidden;
  j["avg_width"] = spec.avg_width;
  j["lstm_hidden"] = spec.lstm_hidden;
  j["lstm_layers"] = spec.lstm_layers;
  j["attention_width"] = spec.attention_width;
  j["attention_heads"] = spec.attention_heads;
  j["context_n"] = spec.context_n;
  j["residual"] = spec.residual;
  j["loss"] = LossName(spec.loss);
  return j;
}

ModelSpec SpecFromJson(const nlohmann::json& j) {
  ModelSpec spec;
  spec.encoder = ParseEncoder(j.at("encoder").get<std::string>());
  spec.family = j.at("family").get<std::string>();
  spec.state_dim = j.at("state_dim").get<int>();
  spec.action_dim = j.at("action_dim").get<int>();
  spec.params_low = j.at("params_low").get<Vec>();
  spec.params_high = j.at("params_high").get<Vec>();
  spec.latent_dim = j.at("latent_dim").get<int>();
  spec.predictor_hidden = j.at("predictor_hidden").get<std::vector<int>>();
  spec.avg_width = j.at("avg_width").get<int>();
  spec.lstm_hidden = j.at("lstm_hidden").get<int>();
  spec.lstm_layers = j.at("lstm_layers").get<int>();
  spec.attention_width = j.at("attention_width").get<int>();
  spec.attention_heads = j.at("attention_heads").get<int>();
  spec.context_n = j.at("context_n").get<int>();
  spec.residual = j.at("residual").get<bool>();
  spec.loss = ParseLoss(j.at("loss").get<std::string>());
  Validate(spec);
  return spec;
}

Normalizer Normalizer::Identity(const ModelSpec& spec) {
  Normalizer n;
  n.state_mean.assign(spec.state_dim, 0.0);
  n.state_scale.assign(spec.state_dim, 1.0);
  n.action_mean.assign(spec.action_dim, 0.0);
  n.action_scale.assign(spec.action_dim, 1.0);
  n.target_mean = n.state_mean;
  n.target_scale = n.state_scale;
  return n;
}

Normalizer Normalizer::Fit(const ModelSpec& spec, const std::vector<envsim::Transition>& data) {
  std::vector<Vec> states, actions, targets;
  for (const auto& t : data) {
    CheckWidth("state", t.s.size(), spec.state_dim);
    CheckWidth("action", t.a.size(), spec.action_dim);
    states.push_back(t.s);
    actions.push_back(t.a);
    targets.push_back(RawTarget(spec, t));
  }
  Normalizer n;
  MeanScale(states, spec.state_dim, n.state_mean, n.state_scale);
  MeanScale(actions, spec.action_dim, n.action_mean, n.action_scale);
  MeanScale(targets, spec.state_dim, n.target_mean, n.target_scale);
  return n;
}

Model::Model(ModelSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  Validate(spec_);
  normalizer_ = Normalizer::Identity(spec_);
  Rng rng(DeriveSeed(seed, "model/init"));
  const int tuple = spec_.tuple_dim();
  switch (spec_.encoder) {
    case EncoderKind::kAvg:
      avg_ = nets::Mlp({tuple, {spec_.avg_width}, spec_.latent_dim, nets::Activation::kRelu},
                       store_, "encoder", rng);
      break;
    case EncoderKind::kRnn:
      rnn_ = nets::Lstm({tuple, spec_.lstm_hidden, spec_.lstm_layers, spec_.latent_dim}, store_,
                        "encoder", rng);
      break;
    case EncoderKind::kTfm:
      tfm_ = nets::SetAttention(
          {tuple, spec_.attention_width, spec_.attention_heads, spec_.latent_dim}, store_,
          "encoder", rng);
      break;
    case EncoderKind::kNone:
    case EncoderKind::kExplicit:
      break;
  }
  predictor_ = nets::Mlp({spec_.state_dim + spec_.action_dim + spec_.conditioning_dim(),
                          spec_.predictor_hidden, spec_.state_dim, nets::Activation::kRelu},
                         store_, "predictor", rng);
}

void Model::set_normalizer(Normalizer n) {
  CheckWidth("normalizer state", n.state_mean.size(), spec_.state_dim);
  CheckWidth("normalizer state", n.state_scale.size(), spec_.state_dim);
  CheckWidth("normalizer action", n.action_mean.size(), spec_.action_dim);
  CheckWidth("normalizer action", n.action_scale.size(), spec_.action_dim);
  CheckWidth("normalizer target", n.target_mean.size(), spec_.state_dim);
  CheckWidth("normalizer target", n.target_scale.size(), spec_.state_dim);
  normalizer_ = std::move(n);
}

std::vector<std::string> Model::EncoderParameterNames() const {
  std::vector<std::string> out;
  for (const auto& name : store_.names()) {
    if (name.rfind("encoder.", 0) == 0) out.push_back(name);
  }
  return out;
}

Tensor Model::ContextTensor(const std::vector<const ContextSet*>& contexts, std::size_t begin,
                            std::size_t end) const {
  const int n = static_cast<int>(contexts[begin]->size());
  const int width = spec_.tuple_dim();
  std::vector<double> values;
  values.reserve((end - begin) * n * width);
  const Normalizer& z = normalizer_;
  for (std::size_t b = begin; b < end; ++b) {
    for (const auto& t : contexts[b]->points) {
      CheckWidth("context state", t.s.size(), spec_.state_dim);
      CheckWidth("context action", t.a.size(), spec_.action_dim);
      CheckWidth("context next state", t.s_next.size(), spec_.state_dim);
      for (double v : Affine(t.s, z.state_mean, z.state_scale)) values.push_back(v);
      for (double v : Affine(t.a, z.action_mean, z.action_scale)) values.push_back(v);
      for (double v : Affine(RawTarget(spec_, t), z.target_mean, z.target_scale)) {
        values.push_back(v);
      }
    }
  }
  return Tensor::Constant({static_cast<int>(end - begin), n, width}, std::move(values));
}

Tensor Model::EncodeGroup(const Tensor& tuples) const {
  switch (spec_.encoder) {
    case EncoderKind::kAvg:
      return numcore::Mean(avg_.Forward(tuples), 1);
    case EncoderKind::kRnn:
      return rnn_.Forward(tuples);
    case EncoderKind::kTfm:
      return tfm_.Forward(tuples);
    default:
      throw std::logic_error("encoder kind has no context summarizer");
  }
}

Tensor Model::EncodeBatch(const std::vector<const ContextSet*>& contexts) const {
  if (!spec_.uses_context()) {
    throw std::logic_error("EncodeBatch on encoder kind '" +
                           std::string(EncoderName(spec_.encoder)) + "'");
  }
  if (contexts.empty()) throw std::invalid_argument("EncodeBatch: empty batch");
  // Contiguous runs of equal context size are encoded together.
  std::vector<Tensor> parts;
  std::size_t begin = 0;
  while (begin < contexts.size()) {
    std::size_t end = begin + 1;
    while (end < contexts.size() && contexts[end]->size() == contexts[begin]->size()) ++end;
    if (contexts[begin]->empty()) {
      parts.push_back(Tensor::Zeros({static_cast<int>(end - begin), spec_.latent_dim}));
    } else {
      parts.push_back(EncodeGroup(ContextTensor(contexts, begin, end)));
    }
    begin = end;
  }
  return parts.size() == 1 ? parts[0] : numcore::Concat(parts, 0);
}

Latent Model::Encode(const ContextSet& context) const {
  numcore::NoGradGuard no_grad;
  const Tensor z = EncodeBatch({&context});
  return Latent(z.values().begin(), z.values().end());
}

Vec Model::NormalizedParams(const EnvParams& params) const {
  CheckWidth("parameter", params.values.size(), spec_.params_dim());
  Vec out(params.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 2.0 * (params.values[i] - spec_.params_low[i]) /
                 (spec_.params_high[i] - spec_.params_low[i]) -
             1.0;
  }
  return out;
}

Vec Model::Conditioning(const ContextSet& context, const EnvParams& params) const {
  if (spec_.uses_context()) return Encode(context);
  if (spec_.encoder == EncoderKind::kExplicit) return NormalizedParams(params);
  return {};
}

Tensor Model::ConditioningBatch(const std::vector<const ContextSet*>& contexts,
                                const std::vector<const EnvParams*>& params) const {
  if (spec_.uses_context()) return EncodeBatch(contexts);
  const int rows =
      static_cast<int>(spec_.encoder == EncoderKind::kExplicit ? params.size() : contexts.size());
  std::vector<double> values;
  if (spec_.encoder == EncoderKind::kExplicit) {
    for (const EnvParams* p : params) {
      for (double v : NormalizedParams(*p)) values.push_back(v);
    }
  }
  return Tensor::Constant({rows, spec_.conditioning_dim()}, std::move(values));
}

void Model::CheckWidths(const Vec& s, const Vec& a) const {
  CheckWidth("state", s.size(), spec_.state_dim);
  CheckWidth("action", a.size(), spec_.action_dim);
}

Tensor Model::ForwardNormalized(const std::vector<Vec>& states, const std::vector<Vec>& actions,
                                const Tensor& conditioning) const {
  if (states.size() != actions.size() || states.empty()) {
    throw std::invalid_argument("predict: need equal, nonzero numbers of states and actions");
  }
  const int batch = static_cast<int>(states.size());
  const int cond = spec_.conditioning_dim();
  if (conditioning.rank() != 2 || conditioning.dim(1) != cond ||
      (conditioning.dim(0) != batch && conditioning.dim(0) != 1)) {
    throw std::invalid_argument(
        "predict: conditioning of shape " + numcore::ShapeString(conditioning.shape()) +
        " does not fit batch " + std::to_string(batch) + " x " + std::to_string(cond));
  }
  const int width = spec_.state_dim + spec_.action_dim;
  std::vector<double> sa;
  sa.reserve(static_cast<std::size_t>(batch) * width);
  for (int b = 0; b < batch; ++b) {
    CheckWidths(states[b], actions[b]);
    for (double v : Affine(states[b], normalizer_.state_mean, normalizer_.state_scale)) {
      sa.push_back(v);
    }
    for (double v : Affine(actions[b], normalizer_.action_mean, normalizer_.action_scale)) {
      sa.push_back(v);
    }
  }
  Tensor input = Tensor::Constant({batch, width}, std::move(sa));
  if (cond > 0) {
    Tensor c = conditioning;
    if (c.dim(0) != batch) {
      // One conditioning row shared by the whole batch.
      std::vector<double> rows;
      rows.reserve(static_cast<std::size_t>(batch) * cond);
      for (int b = 0; b < batch; ++b) rows.insert(rows.end(), c.values().begin(), c.values().end());
      c = Tensor::Constant({batch, cond}, std::move(rows));
    }
    input = numcore::Concat({input, c}, 1);
  }
  return predictor_.Forward(input);
}

std::vector<Vec> Model::PredictBatch(const std::vector<Vec>& states,
                                     const std::vector<Vec>& actions,
                                     const Tensor& conditioning) const {
  numcore::NoGradGuard no_grad;
  const Tensor out = ForwardNormalized(states, actions, conditioning);
  std::vector<Vec> result(states.size(), Vec(spec_.state_dim));
  for (std::size_t b = 0; b < states.size(); ++b) {
    for (int i = 0; i < spec_.state_dim; ++i) {
      double v = out.at(b * spec_.state_dim + i) * normalizer_.target_scale[i] +
                 normalizer_.target_mean[i];
      result[b][i] = spec_.residual ? states[b][i] + v : v;
    }
  }
  return result;
}

std::vector<Vec> Model::PredictBatch(const std::vector<Vec>& states,
                                     const std::vector<Vec>& actions,
                                     const Vec& conditioning) const {
  CheckWidth("conditioning", conditioning.size(), spec_.conditioning_dim());
  return PredictBatch(states, actions,
                      Tensor::Constant({1, spec_.conditioning_dim()}, conditioning));
}

Vec Model::Predict(const Vec& s, const Vec& a, const Vec& conditioning) const {
  return PredictBatch({s}, {a}, conditioning)[0];
}

Vec Model::NormalizedTarget(const envsim::Transition& t) const {
  CheckWidths(t.s, t.a);
  CheckWidth("next state", t.s_next.size(), spec_.state_dim);
  return Affine(RawTarget(spec_, t), normalizer_.target_mean, normalizer_.target_scale);
}

nlohmann::ordered_json Model::ToJson() const {
  nlohmann::ordered_json j;
  j["format"] = "iida-model";
  j["version"] = 1;
  j["spec"] = model::ToJson(spec_);
  const Normalizer& n = normalizer_;
  j["normalizer"] = {{"state_mean", n.state_mean},   {"state_scale", n.state_scale},
                     {"action_mean", n.action_mean}, {"action_scale", n.action_scale},
                     {"target_mean", n.target_mean}, {"target_scale", n.target_scale}};
  j["params"] = nlohmann::ordered_json::parse(store_.ToJson().dump());
  return j;
}

Model Model::FromJson(const nlohmann::json& j) {
  if (j.value("format", "") != "iida-model") {
    throw std::invalid_argument("checkpoint: not an iida-model document");
  }
  if (j.value("version", 0) != 1) throw std::invalid_argument("checkpoint: unsupported version");
  Model model(SpecFromJson(j.at("spec")), 0);
  const auto& n = j.at("normalizer");
  Normalizer norm;
  norm.state_mean = n.at("state_mean").get<Vec>();
  norm.state_scale = n.at("state_scale").get<Vec>();
  norm.action_mean = n.at("action_mean").get<Vec>();
  norm.action_scale = n.at("action_scale").get<Vec>();
  norm.target_mean = n.at("target_mean").get<Vec>();
  norm.target_scale = n.at("target_scale").get<Vec>();
  model.set_normalizer(std::move(norm));
  model.store_.LoadJson(j.at("params"));
  return model;
}

void Model::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << ToJson().dump() << "\n";
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

Model Model::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint not found: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint " + path.string() + " is not valid JSON");
  }
  return FromJson(doc);
}

}  // namespace iida::model
