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

#ifndef IIDA_CONTROL_CEM_H_
#define IIDA_CONTROL_CEM_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "iida/envsim/family.h"
#include "iida/model/model.h"

namespace iida::control {

using envsim::EnvParams;
using envsim::Family;
using envsim::Transition;
using envsim::Vec;

struct CEMConfig {
  int population = 256;
  double elite_fraction = 0.1;
  int iterations = 10;
  int max_retries = 3;
  double variance_floor = 1e-4;  // per action dimension
  // Plans whose best predicted distance exceeds this are retried.
  double retry_threshold = 0.0;
  // Initial sampling distribution, one entry per action dimension.
  Vec init_mean;
  Vec init_variance;
};

void Validate(const CEMConfig& config, int action_width);

// Success radius used for both retries and goal checks: 5% of the family's
// workspace span.
double SuccessRadius(const Family& family);

// Defaults with the initial distribution set to the per-dimension mean and
// variance of the given (train) actions.
CEMConfig DefaultCemConfig(const Family& family, const std::vector<Transition>& train);

// Predicted next states for a batch of candidate actions from one state.
using BatchPredictor =
    std::function<std::vector<Vec>(const Vec& state, const std::vector<Vec>& actions)>;

// Learned model with a fixed conditioning row (latent, true parameters, or
// empty).
BatchPredictor ModelPredictor(const model::Model& model, Vec conditioning);
// Ground-truth dynamics.
BatchPredictor SimulatorPredictor(const Family& family, EnvParams params);

struct PlanResult {
  Vec action;
  double predicted_distance = 0.0;
  bool below_threshold = false;
  int retries = 0;
  // Per iteration of the first attempt: best predicted distance so far, and
  // the mean predicted distance of that iteration's elite set.
  std::vector<double> best_distance;
  std::vector<double> elite_distance;
};

// Cross-entropy search for argmin_a distance(predict(s, a), goal). Candidates
// are clipped to the action bounds before scoring.
PlanResult CemPlan(const BatchPredictor& predict, const Family& family, const Vec& state,
                   const Vec& goal, const CEMConfig& config, std::uint64_t seed);

struct GoalOutcome {
  int env_id = -1;
  int goal_index = 0;
  Vec goal;
  Vec action;
  double predicted_distance = 0.0;
  double executed_distance = 0.0;
  bool success = false;
  int retries = 0;
};

struct GoalReport {
  std::vector<GoalOutcome> outcomes;
  double success_rate = 1.0;  // vacuously 1 with no goals
  double threshold = 0.0;
};

// Each goal is a recorded transition: plan from its start state toward its
// end state, execute in the true simulator, and count a success when the
// executed end lies within the success radius.
GoalReport GoalReachingEval(const BatchPredictor& predict, const Family& family,
                            const EnvParams& params, int env_id,
                            const std::vector<Transition>& goals, const CEMConfig& config,
                            std::uint64_t seed);

// Results CSV rows: model,env_id,goal,goal_1..,action_1..,predicted_distance,
// executed_distance,success,retries
std::vector<std::string> OutcomeHeader(int state_width, int action_width);
std::vector<std::vector<std::string>> OutcomeRows(const std::string& model_name,
                                                  const GoalReport& report);

}  // namespace iida::control

#endif  // IIDA_CONTROL_CEM_H_
