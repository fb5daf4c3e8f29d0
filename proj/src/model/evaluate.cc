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

#include "iida/model/evaluate.h"

#include <algorithm>
#include <stdexcept>

namespace iida::model {
namespace {

constexpr std::size_t kChunk = 256;

struct ErrorSum {
  double sse = 0.0;
  std::size_t count = 0;
};

ErrorSum EnvErrors(const Model& model, const data::EnvDataset& env, int context_n,
                   std::uint64_t seed) {
  ErrorSum sum;
  const auto& ts = env.transitions;
  for (std::size_t begin = 0; begin < ts.size(); begin += kChunk) {
    const std::size_t end = std::min(ts.size(), begin + kChunk);
    std::vector<ContextSet> contexts;
    std::vector<Vec> states, actions;
    for (std::size_t i = begin; i < end; ++i) {
      if (model.spec().uses_context()) contexts.push_back(EvalContext(env, i, context_n, seed));
      states.push_back(ts[i].s);
      actions.push_back(ts[i].a);
    }
    std::vector<const ContextSet*> context_ptrs;
    for (const auto& c : contexts) context_ptrs.push_back(&c);
    if (!model.spec().uses_context()) context_ptrs.assign(end - begin, nullptr);
    std::vector<const EnvParams*> params(end - begin, &env.params);
    std::vector<Vec> predicted;
    {
      numcore::NoGradGuard no_grad;
      predicted =
          model.PredictBatch(states, actions, model.ConditioningBatch(context_ptrs, params));
    }
    for (std::size_t i = begin; i < end; ++i) {
      const Vec& p = predicted[i - begin];
      for (std::size_t d = 0; d < p.size(); ++d) {
        const double e = p[d] - ts[i].s_next[d];
        sum.sse += e * e;
      }
      sum.count += p.size();
    }
  }
  return sum;
}

}  // namespace

ContextSet EvalContext(const data::EnvDataset& env, std::size_t index, int context_n,
                       std::uint64_t seed) {
  const std::uint64_t s = DeriveSeed(
      DeriveSeed(DeriveSeed(seed, "eval/context"), static_cast<std::uint64_t>(env.env_id)),
      static_cast<std::uint64_t>(index));
  return data::SampleContext(env, context_n, index, s);
}

double EvaluateEnvMse(const Model& model, const data::EnvDataset& env, int context_n,
                      std::uint64_t seed) {
  const ErrorSum sum = EnvErrors(model, env, context_n, seed);
  if (sum.count == 0) throw std::invalid_argument("evaluate: environment has no transitions");
  return sum.sse / static_cast<double>(sum.count);
}

double EvaluateMse(const Model& model, const data::DatasetCollection& collection, data::Split split,
                   int context_n, std::uint64_t seed) {
  ErrorSum total;
  for (const data::EnvDataset* env : collection.Select(split)) {
    const ErrorSum sum = EnvErrors(model, *env, context_n, seed);
    total.sse += sum.sse;
    total.count += sum.count;
  }
  if (total.count == 0) {
    throw std::invalid_argument("evaluate: split '" + std::string(data::SplitName(split)) +
                                "' has no transitions");
  }
  return total.sse / static_cast<double>(total.count);
}

}  // namespace iida::model
