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

#include "iida/control/cem.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "iida/common/random.h"
#include "iida/common/text.h"

namespace iida::control {

void Validate(const CEMConfig& config, int action_width) {
  if (config.population < 10) throw std::invalid_argument("cem: population must be >= 10");
  if (!(config.elite_fraction > 0.0 && config.elite_fraction < 1.0)) {
    throw std::invalid_argument("cem: elite fraction must lie in (0, 1)");
  }
  if (config.iterations < 1 || config.max_retries < 0) {
    throw std::invalid_argument("cem: iterations must be >= 1 and max_retries >= 0");
  }
  if (!(config.variance_floor > 0.0))
    throw std::invalid_argument("cem: variance floor must be > 0");
  if (static_cast<int>(config.init_mean.size()) != action_width ||
      static_cast<int>(config.init_variance.size()) != action_width) {
    throw std::invalid_argument("cem: initial mean/variance width must equal action width " +
                                std::to_string(action_width));
  }
}

double SuccessRadius(const Family& family) { return 0.05 * family.workspace_span(); }

CEMConfig DefaultCemConfig(const Family& family, const std::vector<Transition>& train) {
  if (train.empty()) throw std::invalid_argument("cem: no train actions to initialize from");
  const int width = family.action_width();
  CEMConfig config;
  config.retry_threshold = SuccessRadius(family);
  config.init_mean.assign(width, 0.0);
  config.init_variance.assign(width, 0.0);
  for (const auto& t : train) {
    for (int i = 0; i < width; ++i) config.init_mean[i] += t.a[i];
  }
  for (double& m : config.init_mean) m /= static_cast<double>(train.size());
  for (const auto& t : train) {
    for (int i = 0; i < width; ++i) {
      config.init_variance[i] += (t.a[i] - config.init_mean[i]) * (t.a[i] - config.init_mean[i]);
    }
  }
  for (double& v : config.init_variance) {
    v = std::max(v / static_cast<double>(train.size()), config.variance_floor);
  }
  return config;
}

BatchPredictor ModelPredictor(const model::Model& model, Vec conditioning) {
  return [&model, conditioning = std::move(conditioning)](const Vec& state,
                                                          const std::vector<Vec>& actions) {
    return model.PredictBatch(std::vector<Vec>(actions.size(), state), actions, conditioning);
  };
}

BatchPredictor SimulatorPredictor(const Family& family, EnvParams params) {
  return [&family, params = std::move(params)](const Vec& state, const std::vector<Vec>& actions) {
    std::vector<Vec> out;
    out.reserve(actions.size());
    for (const Vec& a : actions) out.push_back(family.Step(params, state, a));
    return out;
  };
}

namespace {

struct Attempt {
  Vec action;
  double distance = INFINITY;
  std::vector<double> best_distance;
  std::vector<double> elite_distance;
};

Attempt RunCem(const BatchPredictor& predict, const Family& family, const Vec& state,
               const Vec& goal, const CEMConfig& config, std::uint64_t seed) {
  const int width = family.action_width();
  const int elites =
      std::max(1, static_cast<int>(std::round(config.elite_fraction * config.population)));
  Rng rng(seed);
  Vec mean = config.init_mean;
  Vec var = config.init_variance;
  Attempt best;
  std::vector<Vec> candidates(config.population, Vec(width));
  std::vector<std::size_t> order(config.population);
  for (int it = 0; it < config.iterations; ++it) {
    for (Vec& c : candidates) {
      for (int i = 0; i < width; ++i) c[i] = Normal(rng, mean[i], std::sqrt(var[i]));
      c = family.ClipAction(std::move(c));
    }
    const std::vector<Vec> predicted = predict(state, candidates);
    std::vector<double> distance(config.population);
    for (int k = 0; k < config.population; ++k) {
      distance[k] = family.GoalDistance(predicted[k], goal);
      if (!std::isfinite(distance[k])) distance[k] = INFINITY;
    }
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return distance[a] < distance[b]; });
    if (distance[order[0]] < best.distance) {
      best.distance = distance[order[0]];
      best.action = candidates[order[0]];
    }
    double elite_mean = 0.0;
    for (int i = 0; i < width; ++i) {
      double m = 0.0;
      for (int e = 0; e < elites; ++e) m += candidates[order[e]][i];
      m /= elites;
      double v = 0.0;
      for (int e = 0; e < elites; ++e) {
        v += (candidates[order[e]][i] - m) * (candidates[order[e]][i] - m);
      }
      mean[i] = m;
      var[i] = std::max(v / elites, config.variance_floor);
    }
    for (int e = 0; e < elites; ++e) elite_mean += distance[order[e]];
    best.elite_distance.push_back(elite_mean / elites);
    best.best_distance.push_back(best.distance);
  }
  if (best.action.empty()) best.action = family.ClipAction(config.init_mean);
  return best;
}

}  // namespace

PlanResult CemPlan(const BatchPredictor& predict, const Family& family, const Vec& state,
                   const Vec& goal, const CEMConfig& config, std::uint64_t seed) {
  Validate(config, family.action_width());
  PlanResult result;
  Attempt best;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    Attempt a = RunCem(predict, family, state, goal, config,
                       DeriveSeed(seed, static_cast<std::uint64_t>(attempt)));
    if (attempt == 0) {
      result.best_distance = a.best_distance;
      result.elite_distance = a.elite_distance;
    }
    if (a.distance < best.distance || best.action.empty()) best = std::move(a);
    result.retries = attempt;
    if (best.distance <= config.retry_threshold) break;
  }
  result.action = best.action;
  result.predicted_distance = best.distance;
  result.below_threshold = best.distance <= config.retry_threshold;
  return result;
}

GoalReport GoalReachingEval(const BatchPredictor& predict, const Family& family,
                            const EnvParams& params, int env_id,
                            const std::vector<Transition>& goals, const CEMConfig& config,
                            std::uint64_t seed) {
  GoalReport report;
  report.threshold = SuccessRadius(family);
  int successes = 0;
  for (std::size_t g = 0; g < goals.size(); ++g) {
    const Transition& t = goals[g];
    const PlanResult plan = CemPlan(predict, family, t.s, t.s_next, config,
                                    DeriveSeed(seed, static_cast<std::uint64_t>(g)));
    GoalOutcome o;
    o.env_id = env_id;
    o.goal_index = static_cast<int>(g);
    o.goal = t.s_next;
    o.action = plan.action;
    o.predicted_distance = plan.predicted_distance;
    o.executed_distance = family.GoalDistance(family.Step(params, t.s, plan.action), t.s_next);
    o.success = o.executed_distance <= report.threshold;
    o.retries = plan.retries;
    successes += o.success;
    report.outcomes.push_back(std::move(o));
  }
  if (!goals.empty()) report.success_rate = static_cast<double>(successes) / goals.size();
  return report;
}

std::vector<std::string> OutcomeHeader(int state_width, int action_width) {
  std::vector<std::string> h = {"model", "env_id", "goal"};
  for (int i = 1; i <= state_width; ++i) h.push_back("goal_" + std::to_string(i));
  for (int i = 1; i <= action_width; ++i) h.push_back("action_" + std::to_string(i));
  for (const char* c : {"predicted_distance", "executed_distance", "success", "retries"}) {
    h.push_back(c);
  }
  return h;
}

std::vector<std::vector<std::string>> OutcomeRows(const std::string& model_name,
                                                  const GoalReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const GoalOutcome& o : report.outcomes) {
    std::vector<std::string> row = {model_name, std::to_string(o.env_id),
                                    std::to_string(o.goal_index)};
    for (double v : o.goal) row.push_back(FormatDouble(v));
    for (double v : o.action) row.push_back(FormatDouble(v));
    row.push_back(FormatDouble(o.predicted_distance));
    row.push_back(FormatDouble(o.executed_distance));
    row.push_back(o.success ? "1" : "0");
    row.push_back(std::to_string(o.retries));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace iida::control
