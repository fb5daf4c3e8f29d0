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

#include <cmath>
#include <cstring>
#include <numbers>

#include "gtest/gtest.h"
#include "iida/envsim/family.h"
#include "iida/envsim/physics.h"
#include "oracles.h"

namespace iida::envsim {
namespace {

constexpr double kPi = std::numbers::pi;

EnvParams RandomParams(const Family& family, Rng& rng) {
  EnvParams p;
  for (const auto& f : family.factors()) p.values.push_back(Uniform(rng, f.low, f.high));
  return p;
}

TEST(SlidePuck, VanishingSpeedStaysPut) {
  const Family& f = FamilyByName("slidepuck");
  Rng rng(1);
  const EnvParams params = RandomParams(f, rng);
  const Vec start = {0.2, -0.3};
  EXPECT_EQ(f.Step(params, start, {1.0, slide_puck::kMinSpeed}), start);
}

TEST(SlidePuck, PureFrictionMatchesUniformDeceleration) {
  slide_puck::Physics p{.mass = 0.25, .floor_friction = 0.05, .puck_friction = 0.05};
  const double angle = 0.3;
  const auto end = slide_puck::Simulate(p, {0.0, 0.0}, angle, 1.0);
  const double closed_form = 1.0 / (2.0 * 0.1 * 9.81);
  EXPECT_NEAR(closed_form, 0.5097, 1e-4);
  EXPECT_NEAR(std::hypot(end[0], end[1]), closed_form, 1e-3);
  // Travel stays on the push direction.
  EXPECT_NEAR(std::atan2(end[1], end[0]), angle, 1e-9);
  const auto euler = iida::testing::EulerSlide(p, {0.0, 0.0}, angle, 1.0);
  EXPECT_NEAR(std::hypot(euler[0], euler[1]), closed_form, 1e-3);
}

TEST(SlidePuck, HeadwindShortensTravel) {
  slide_puck::Physics calm{
      .mass = 0.2, .floor_friction = 0.03, .puck_friction = 0.03, .damping = 0.01};
  slide_puck::Physics headwind = calm;
  headwind.wind_x = -5.0;
  const auto a = iida::testing::EulerSlide(calm, {0, 0}, 0.0, 1.5);
  const auto b = iida::testing::EulerSlide(headwind, {0, 0}, 0.0, 1.5);
  EXPECT_LT(b[0], a[0]);
  const auto c = slide_puck::Simulate(calm, {0, 0}, 0.0, 1.5);
  const auto d = slide_puck::Simulate(headwind, {0, 0}, 0.0, 1.5);
  EXPECT_LT(d[0], c[0]);
}

TEST(SlidePuck, Rk4AgreesWithFineEulerOracle) {
  const Family& f = FamilyByName("slidepuck");
  Rng rng(2024);
  for (int i = 0; i < 100; ++i) {
    const EnvParams params = RandomParams(f, rng);
    const Vec start = f.SampleState(rng);
    const Vec a = f.SampleAction(rng);
    const Vec end = f.Step(params, start, a);
    const auto oracle =
        iida::testing::EulerSlide(slide_puck::FromParams(params), {start[0], start[1]}, a[0], a[1]);
    ASSERT_LT(std::hypot(end[0] - oracle[0], end[1] - oracle[1]), 1e-3) << "draw " << i;
  }
}

TEST(SlidePuck, TravelNonIncreasingInFriction) {
  const Family& f = FamilyByName("slidepuck");
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    EnvParams params = RandomParams(f, rng);
    const Vec a = f.SampleAction(rng);
    double previous = std::numeric_limits<double>::infinity();
    for (double mu : {0.02, 0.04, 0.06, 0.08, 0.1}) {
      params.values[1] = mu;
      const Vec end = f.Step(params, {0.0, 0.0}, a);
      const double travel = std::hypot(end[0], end[1]);
      ASSERT_LE(travel, previous + 1e-12);
      previous = travel;
    }
  }
}

TEST(SlidePuck, Deterministic) {
  const Family& f = FamilyByName("slidepuck");
  Rng rng(3);
  const EnvParams params = RandomParams(f, rng);
  const Vec a = f.SampleAction(rng);
  const Vec x = f.Step(params, {0.1, 0.1}, a), y = f.Step(params, {0.1, 0.1}, a);
  EXPECT_EQ(std::memcmp(x.data(), y.data(), 2 * sizeof(double)), 0);
}

TEST(SlidePuck, RejectsOutOfRangeInputs) {
  const Family& f = FamilyByName("slidepuck");
  EnvParams params = f.Nominal();
  EXPECT_THROW(f.Step(params, {0, 0}, {0.0, 3.5}), RangeError);
  EXPECT_THROW(f.Step(params, {0, 0}, {0.0, 0.0}), RangeError);
  EXPECT_THROW(f.Step(params, {0, 0}, {4.0, 1.0}), RangeError);
  params.values[0] = 0.5;  // puck_mass above 0.4
  EXPECT_THROW(f.Step(params, {0, 0}, {0.0, 1.0}), RangeError);
  EXPECT_THROW(f.Step(f.Nominal(), {0, 0, 0}, {0.0, 1.0}), RangeError);
}

TEST(PushBox, CenteredMassDoesNotDeflectOrRotate) {
  push_box::Physics p{.com_offset = 0.0, .box_mass = 1.3};
  const auto o = push_box::Push(p, 0.03, 0.7, 1.2);
  EXPECT_EQ(o.heading, 0.7);
  EXPECT_EQ(o.rotation, 0.0);
}

TEST(PushBox, DoublingMassHalvesTravel) {
  push_box::Physics light{.com_offset = 0.05, .box_mass = 0.8};
  push_box::Physics heavy = light;
  heavy.box_mass = 1.6;
  EXPECT_DOUBLE_EQ(push_box::Push(heavy, 0.02, 0.1, 2.0).travel,
                   0.5 * push_box::Push(light, 0.02, 0.1, 2.0).travel);
}

TEST(PushBox, OppositeOffsetsMirrorHeading) {
  push_box::Physics plus{.com_offset = 0.14}, minus{.com_offset = -0.14};
  const double angle = -1.1;
  const auto a = push_box::Push(plus, 0.0, angle, 1.0);
  const auto b = push_box::Push(minus, 0.0, angle, 1.0);
  EXPECT_DOUBLE_EQ(a.heading - angle, -(b.heading - angle));
  EXPECT_DOUBLE_EQ(a.rotation, -b.rotation);
}

TEST(PushBox, StateStaysOnUnitCircle) {
  const Family& f = FamilyByName("pushbox");
  Rng rng(4);
  const EnvParams params = RandomParams(f, rng);
  Vec s = f.SampleState(rng);
  for (int i = 0; i < 200; ++i) {
    s = f.Step(params, s, f.SampleAction(rng));
    ASSERT_NEAR(s[2] * s[2] + s[3] * s[3], 1.0, 1e-9);
  }
}

TEST(MultiStep, RestWithoutForcesIsStationary) {
  multistep::Physics p{.mass = 1.3, .drag = 0.4, .gain = 0.9};
  const Vec s = {0.3, -0.2, 0.0, 0.0};
  EXPECT_EQ(multistep::Step(p, s, {0.0, 0.0}), s);
}

TEST(MultiStep, SingleStepByDirectSubstitution) {
  multistep::Physics p{.mass = 1.0, .drag = 0.0, .gain = 1.0};
  const Vec next = multistep::Step(p, {0.0, 0.0, 0.0, 0.0}, {1.0, 0.0});
  EXPECT_DOUBLE_EQ(next[2], 0.05);
  EXPECT_DOUBLE_EQ(next[3], 0.0);
  EXPECT_DOUBLE_EQ(next[0], 0.05 * 0.05);
}

TEST(MultiStep, ReachesTerminalSpeed) {
  multistep::Physics p{.mass = 1.7, .drag = 0.3, .gain = 1.2};
  Vec s = {0, 0, 0, 0};
  const Vec a = {0.8, -0.6};
  for (int i = 0; i < 5000; ++i) s = multistep::Step(p, s, a);
  const double terminal = p.gain * std::hypot(a[0], a[1]) / p.drag;
  EXPECT_NEAR(std::hypot(s[2], s[3]), terminal, 0.01 * terminal);
}

TEST(MultiStep, BaseRolloutRespectsActionBounds) {
  const Family& f = FamilyByName("multistep");
  Rng rng(5);
  const auto pairs = multistep::BaseRollout(f, f.Nominal(), f.horizon(), rng);
  ASSERT_EQ(pairs.size(), 50u);
  for (const auto& [s, a] : pairs) {
    EXPECT_NO_THROW(f.ValidateAction(a));
    EXPECT_EQ(s.size(), 4u);
  }
}

TEST(Relabel, SameParamsReproduceNextStates) {
  const Family& f = FamilyByName("multistep");
  Rng rng(6);
  const EnvParams nominal = f.Nominal();
  const auto pairs = multistep::BaseRollout(f, nominal, 50, rng);
  const auto relabeled = Relabel(f, pairs, nominal, 3);
  for (std::size_t t = 0; t + 1 < pairs.size(); ++t) {
    EXPECT_EQ(relabeled[t].s_next, pairs[t + 1].s);
    EXPECT_EQ(relabeled[t].env_id, 3);
  }
}

TEST(Relabel, DifferentDragGivesDifferentNextState) {
  const Family& f = FamilyByName("multistep");
  EnvParams low = f.Nominal(), high = f.Nominal();
  low.values[1] = 0.1;
  high.values[1] = 1.0;
  std::vector<StateAction> pairs = {{{0.1, 0.2, 0.5, -0.4}, {0.3, 0.3}}};
  EXPECT_NE(Relabel(f, pairs, low)[0].s_next, Relabel(f, pairs, high)[0].s_next);
}

TEST(Relabel, TrueDynamicsHaveZeroOneStepError) {
  const Family& f = FamilyByName("multistep");
  Rng rng(8);
  const auto pairs = multistep::BaseRollout(f, f.Nominal(), 200, rng);
  const EnvParams params = RandomParams(f, rng);
  double sse = 0.0;
  for (const auto& t : Relabel(f, pairs, params)) {
    const Vec predicted = f.Step(params, t.s, t.a);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      sse += (predicted[i] - t.s_next[i]) * (predicted[i] - t.s_next[i]);
    }
  }
  EXPECT_EQ(sse, 0.0);
}

TEST(Relabel, RejectsMismatchedFamily) {
  const Family& f = FamilyByName("multistep");
  std::vector<StateAction> pairs = {{{0.0, 0.0}, {0.0, 1.0}}};
  EXPECT_THROW(Relabel(f, pairs, f.Nominal()), RangeError);
  EXPECT_THROW(Relabel(f, pairs, FamilyByName("slidepuck").Nominal()), RangeError);
}

TEST(Family, UnknownNameListsValidFamilies) {
  try {
    FamilyByName("hopper");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("slidepuck, pushbox, multistep"), std::string::npos);
  }
}

TEST(Family, NormalizedParamsSpanUnitInterval) {
  const Family& f = FamilyByName("pushbox");
  EnvParams low, high;
  for (const auto& factor : f.factors()) {
    low.values.push_back(factor.low);
    high.values.push_back(factor.high);
  }
  for (double v : f.NormalizedParams(low)) EXPECT_DOUBLE_EQ(v, -1.0);
  for (double v : f.NormalizedParams(high)) EXPECT_DOUBLE_EQ(v, 1.0);
  for (double v : f.NormalizedParams(f.Nominal())) EXPECT_NEAR(v, 0.0, 1e-12);
}

}  // namespace
}  // namespace iida::envsim
