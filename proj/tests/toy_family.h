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

#ifndef IIDA_TESTS_TOY_FAMILY_H_
#define IIDA_TESTS_TOY_FAMILY_H_

#include <vector>

#include "iida/common/random.h"
#include "iida/datastore/dataset.h"
#include "iida/model/model.h"

namespace iida::testing {

// Two environments sharing the same (s, a) draws with s' = c_e * (s + a).
// Identical inputs therefore map to different outputs depending on the env.
inline data::DatasetCollection LinearToyCollection(int n, double c0, double c1,
                                                   std::uint64_t seed) {
  data::DatasetCollection c;
  c.family = "linear-toy";
  c.seed = seed;
  Rng rng(seed);
  std::vector<std::pair<double, double>> inputs;
  for (int i = 0; i < n; ++i) {
    const double s = Uniform(rng, 0.5, 1.0);
    inputs.emplace_back(s, Uniform(rng, 0.0, 0.5));
  }
  const double coeffs[] = {c0, c1};
  for (int e = 0; e < 3; ++e) {
    data::EnvDataset env;
    env.env_id = e;
    // The third environment only exists to give training a val split.
    env.split = e < 2 ? data::Split::kTrain : data::Split::kVal;
    const double coeff = coeffs[e % 2];
    env.params.values = {coeff};
    for (const auto& [s, a] : inputs) {
      env.transitions.push_back({{s}, {a}, {coeff * (s + a)}, e});
    }
    c.envs.push_back(std::move(env));
  }
  return c;
}

inline model::ModelSpec LinearToySpec(model::EncoderKind kind, int width) {
  model::ModelSpec spec;
  spec.encoder = kind;
  spec.family = "linear-toy";
  spec.state_dim = 1;
  spec.action_dim = 1;
  spec.params_low = {0.0};
  spec.params_high = {2.0};
  spec.predictor_hidden = {width, width};
  spec.avg_width = width;
  spec.context_n = 4;
  return spec;
}

}  // namespace iida::testing

#endif  // IIDA_TESTS_TOY_FAMILY_H_
