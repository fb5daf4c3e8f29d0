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

#include "iida/envsim/family.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "iida/envsim/physics.h"

namespace iida::envsim {
namespace {

constexpr double kPi = std::numbers::pi;

std::string Join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

class SlidePuck final : public Family {
 public:
  std::string_view name() const override { return "slidepuck"; }
  int state_width() const override { return 2; }
  int action_width() const override { return 2; }
  const std::vector<Factor>& factors() const override {
    static const std::vector<Factor> kFactors = {
        {"puck_mass", 0.15, 0.4},    {"floor_friction", 0.02, 0.1}, {"puck_friction", 0.02, 0.1},
        {"wind_x", -5.0, 5.0},       {"wind_y", -5.0, 5.0},         {"table_tilt_x", -1.0, 1.0},
        {"table_tilt_y", -1.0, 1.0}, {"damping", 0.0001, 0.075}};
    return kFactors;
  }
  // (push angle, speed). The lowest speed is already below the stopping
  // threshold, so it yields no motion.
  const Vec& action_low() const override {
    static const Vec kLow = {-kPi, slide_puck::kMinSpeed};
    return kLow;
  }
  const Vec& action_high() const override {
    static const Vec kHigh = {kPi, slide_puck::kMaxSpeed};
    return kHigh;
  }
  Vec Step(const EnvParams& params, const Vec& s, const Vec& a) const override {
    ValidateParams(params);
    ValidateState(s);
    ValidateAction(a);
    auto end = slide_puck::Simulate(slide_puck::FromParams(params), {s[0], s[1]}, a[0], a[1]);
    return {end[0], end[1]};
  }
  Vec SampleState(Rng& rng) const override {
    return {Uniform(rng, -0.5, 0.5), Uniform(rng, -0.5, 0.5)};
  }
  Vec SampleAction(Rng& rng) const override {
    return {Uniform(rng, -kPi, kPi), Uniform(rng, slide_puck::kMinSpeed, slide_puck::kMaxSpeed)};
  }
  double workspace_span() const override { return slide_puck::kWorkspaceSpan; }
};

class PushBox final : public Family {
 public:
  std::string_view name() const override { return "pushbox"; }
  int state_width() const override { return 4; }
  int action_width() const override { return 3; }
  const std::vector<Factor>& factors() const override {
    static const std::vector<Factor> kFactors = {{"com_offset", -0.14, 0.14},
                                                 {"box_mass", 0.5, 2.5},
                                                 {"box_friction", 0.7, 1.3},
                                                 {"floor_friction", 0.7, 1.3},
                                                 {"pusher_friction", 0.7, 1.3}};
    return kFactors;
  }
  // (contact point, push angle, speed)
  const Vec& action_low() const override {
    static const Vec kLow = {-push_box::kMaxContactOffset, -kPi, 0.1};
    return kLow;
  }
  const Vec& action_high() const override {
    static const Vec kHigh = {push_box::kMaxContactOffset, kPi, 3.0};
    return kHigh;
  }
  Vec Step(const EnvParams& params, const Vec& s, const Vec& a) const override {
    ValidateParams(params);
    ValidateState(s);
    ValidateAction(a);
    if (std::abs(s[2] * s[2] + s[3] * s[3] - 1.0) > 1e-9) {
      throw RangeError("pushbox: state (sin, cos) is not on the unit circle");
    }
    return push_box::Apply(push_box::FromParams(params), s, a[0], a[1], a[2]);
  }
  Vec SampleState(Rng& rng) const override {
    const double theta = Uniform(rng, -kPi, kPi);
    return {Uniform(rng, -0.5, 0.5), Uniform(rng, -0.5, 0.5), std::sin(theta), std::cos(theta)};
  }
  double workspace_span() const override { return push_box::kWorkspaceSpan; }
};

class MultiStep final : public Family {
 public:
  std::string_view name() const override { return "multistep"; }
  int state_width() const override { return 4; }
  int action_width() const override { return 2; }
  const std::vector<Factor>& factors() const override {
    static const std::vector<Factor> kFactors = {{"mass", 0.5, 2.0},
                                                 {"drag", 0.1, 1.0},
                                                 {"gain", 0.5, 1.5},
                                                 {"bias_x", -0.3, 0.3},
                                                 {"bias_y", -0.3, 0.3}};
    return kFactors;
  }
  const Vec& action_low() const override {
    static const Vec kLow = {-1.0, -1.0};
    return kLow;
  }
  const Vec& action_high() const override {
    static const Vec kHigh = {1.0, 1.0};
    return kHigh;
  }
  Vec Step(const EnvParams& params, const Vec& s, const Vec& a) const override {
    ValidateParams(params);
    ValidateState(s);
    ValidateAction(a);
    return multistep::Step(multistep::FromParams(params), s, a);
  }
  Vec SampleState(Rng& rng) const override {
    return {Uniform(rng, -1.0, 1.0), Uniform(rng, -1.0, 1.0), Uniform(rng, -0.5, 0.5),
            Uniform(rng, -0.5, 0.5)};
  }
  double workspace_span() const override { return multistep::kWorkspaceSpan; }
  bool multi_step() const override { return true; }
  int horizon() const override { return multistep::kHorizon; }
};

}  // namespace

Vec Family::SampleAction(Rng& rng) const {
  Vec a(action_width());
  for (int i = 0; i < action_width(); ++i) a[i] = Uniform(rng, action_low()[i], action_high()[i]);
  return a;
}

double Family::GoalDistance(const Vec& a, const Vec& b) const {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

int Family::FactorIndex(std::string_view factor) const {
  const auto& f = factors();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].name == factor) return static_cast<int>(i);
  }
  throw std::invalid_argument(std::string(name()) + ": no factor named " + std::string(factor));
}

double Family::Get(const EnvParams& params, std::string_view factor) const {
  return params.values.at(FactorIndex(factor));
}

EnvParams Family::Nominal() const {
  EnvParams p;
  for (const auto& f : factors()) p.values.push_back(0.5 * (f.low + f.high));
  return p;
}

void Family::ValidateParams(const EnvParams& params) const {
  const auto& f = factors();
  if (params.values.size() != f.size()) {
    throw RangeError(std::string(name()) + ": expected " + std::to_string(f.size()) +
                     " factors, got " + std::to_string(params.values.size()));
  }
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = params.values[i];
    if (!(v >= f[i].low && v <= f[i].high)) {
      std::ostringstream msg;
      msg << name() << ": factor " << f[i].name << " = " << v << " outside [" << f[i].low << ", "
          << f[i].high << "]";
      throw RangeError(msg.str());
    }
  }
}

void Family::ValidateAction(const Vec& a) const {
  if (static_cast<int>(a.size()) != action_width()) {
    throw RangeError(std::string(name()) + ": action width " + std::to_string(a.size()) +
                     ", expected " + std::to_string(action_width()));
  }
  for (int i = 0; i < action_width(); ++i) {
    if (!(a[i] >= action_low()[i] && a[i] <= action_high()[i])) {
      std::ostringstream msg;
      msg << name() << ": action[" << i << "] = " << a[i] << " outside [" << action_low()[i] << ", "
          << action_high()[i] << "]";
      throw RangeError(msg.str());
    }
  }
}

void Family::ValidateState(const Vec& s) const {
  if (static_cast<int>(s.size()) != state_width()) {
    throw RangeError(std::string(name()) + ": state width " + std::to_string(s.size()) +
                     ", expected " + std::to_string(state_width()));
  }
  for (double v : s) {
    if (!std::isfinite(v)) throw RangeError(std::string(name()) + ": non-finite state");
  }
}

Vec Family::NormalizedParams(const EnvParams& params) const {
  const auto& f = factors();
  Vec out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = 2.0 * (params.values.at(i) - f[i].low) / (f[i].high - f[i].low) - 1.0;
  }
  return out;
}

Vec Family::ClipAction(Vec a) const {
  for (int i = 0; i < action_width(); ++i)
    a[i] = std::clamp(a[i], action_low()[i], action_high()[i]);
  return a;
}

const Family& FamilyByName(std::string_view name) {
  static const SlidePuck kSlidePuck;
  static const PushBox kPushBox;
  static const MultiStep kMultiStep;
  if (name == "slidepuck") return kSlidePuck;
  if (name == "pushbox") return kPushBox;
  if (name == "multistep") return kMultiStep;
  throw std::invalid_argument("unknown family '" + std::string(name) +
                              "'; valid families: " + Join(FamilyNames()));
}

std::vector<std::string> FamilyNames() { return {"slidepuck", "pushbox", "multistep"}; }

std::vector<Transition> Relabel(const Family& family, const std::vector<StateAction>& pairs,
                                const EnvParams& params, int env_id) {
  family.ValidateParams(params);
  std::vector<Transition> out;
  out.reserve(pairs.size());
  for (const auto& [s, a] : pairs) {
    out.push_back({s, a, family.Step(params, s, a), env_id});
  }
  return out;
}

}  // namespace iida::envsim
