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

#ifndef IIDA_ENVSIM_FAMILY_H_
#define IIDA_ENVSIM_FAMILY_H_

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iida/common/random.h"

namespace iida::envsim {

using Vec = std::vector<double>;

// One hidden factor of an environment family and its sampling range.
struct Factor {
  std::string name;
  double low = 0.0;
  double high = 0.0;
};

// Values of a family's factors, in the family's factor order.
struct EnvParams {
  Vec values;
  bool operator==(const EnvParams&) const = default;
};

// (s, a, s') with the id of the environment that produced it.
struct Transition {
  Vec s;
  Vec a;
  Vec s_next;
  int env_id = -1;
  bool operator==(const Transition&) const = default;
};

// A state/action pair awaiting a next state.
struct StateAction {
  Vec s;
  Vec a;
};

class RangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameterized family of environments sharing state and action spaces.
// Step functions are pure: identical inputs give bitwise-identical outputs.
class Family {
 public:
  virtual ~Family() = default;

  virtual std::string_view name() const = 0;
  virtual int state_width() const = 0;
  virtual int action_width() const = 0;
  virtual const std::vector<Factor>& factors() const = 0;
  virtual const Vec& action_low() const = 0;
  virtual const Vec& action_high() const = 0;

  // Validates params, state and action, then simulates one transition.
  virtual Vec Step(const EnvParams& params, const Vec& s, const Vec& a) const = 0;

  virtual Vec SampleState(Rng& rng) const = 0;
  virtual Vec SampleAction(Rng& rng) const;

  // Distance used for goal reaching: Euclidean over the position part.
  virtual double GoalDistance(const Vec& a, const Vec& b) const;
  // Extent of the reachable region; the success radius is a fraction of it.
  virtual double workspace_span() const = 0;

  // Multi-step families build datasets from base rollouts plus relabeling.
  virtual bool multi_step() const { return false; }
  virtual int horizon() const { return 1; }

  std::size_t num_factors() const { return factors().size(); }
  int FactorIndex(std::string_view factor) const;
  double Get(const EnvParams& params, std::string_view factor) const;
  EnvParams Nominal() const;

  void ValidateParams(const EnvParams& params) const;
  void ValidateAction(const Vec& a) const;
  void ValidateState(const Vec& s) const;
  // Each factor mapped affinely from [low, high] to [-1, 1].
  Vec NormalizedParams(const EnvParams& params) const;
  Vec ClipAction(Vec a) const;
};

// "slidepuck", "pushbox", "multistep". Unknown names throw
// std::invalid_argument listing the valid ones.
const Family& FamilyByName(std::string_view name);
std::vector<std::string> FamilyNames();

// Pairs every (s, a) with its next state under `params`.
std::vector<Transition> Relabel(const Family& family, const std::vector<StateAction>& pairs,
                                const EnvParams& params, int env_id = -1);

}  // namespace iida::envsim

#endif  // IIDA_ENVSIM_FAMILY_H_
