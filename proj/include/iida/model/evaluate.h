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

#ifndef IIDA_MODEL_EVALUATE_H_
#define IIDA_MODEL_EVALUATE_H_

#include <cstdint>

#include "iida/datastore/dataset.h"
#include "iida/model/model.h"

namespace iida::model {

// Context for transition `index` of `env`, excluding that transition. The
// draw depends only on (seed, env_id, index).
ContextSet EvalContext(const data::EnvDataset& env, std::size_t index, int context_n,
                       std::uint64_t seed);

// Mean squared s' error over every transition of the split, each predicted
// with its own freshly drawn context of size context_n.
double EvaluateMse(const Model& model, const data::DatasetCollection& collection, data::Split split,
                   int context_n, std::uint64_t seed);

// Same, restricted to one environment.
double EvaluateEnvMse(const Model& model, const data::EnvDataset& env, int context_n,
                      std::uint64_t seed);

}  // namespace iida::model

#endif  // IIDA_MODEL_EVALUATE_H_
