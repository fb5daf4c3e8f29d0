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

#ifndef IIDA_NUMCORE_ADAM_H_
#define IIDA_NUMCORE_ADAM_H_

#include <cstdint>
#include <vector>

#include "iida/numcore/tensor.h"

namespace iida::numcore {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::int64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

// One bias-corrected Adam update using each parameter's accumulated grad
// (a parameter without a grad is treated as having zero gradient). Moment
// buffers are created on first use. If any gradient entry is non-finite the
// call throws NumericError before touching parameters or state.
void AdamStep(std::vector<Tensor>& params, AdamState& state);

}  // namespace iida::numcore

#endif  // IIDA_NUMCORE_ADAM_H_
