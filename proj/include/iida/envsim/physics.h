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

#ifndef IIDA_ENVSIM_PHYSICS_H_
#define IIDA_ENVSIM_PHYSICS_H_

#include <array>

#include "iida/envsim/family.h"

// Unvalidated physics behind the three families. The Family wrappers check
// ranges; these functions also accept out-of-range values (zero wind, zero
// damping) for analytic tests.
namespace iida::envsim {

namespace slide_puck {

inline constexpr double kGravity = 9.81;
inline constexpr double kMinSpeed = 1e-4;
inline constexpr double kMaxSpeed = 3.0;
// Newtons of force per unit of the wind factor.
inline constexpr double kWindCoupling = 0.003;
inline constexpr double kWorkspaceSpan = 4.0;

struct Physics {
  double mass = 0.25;
  double floor_friction = 0.05;
  double puck_friction = 0.05;
  double wind_x = 0.0;
  double wind_y = 0.0;
  double tilt_x_deg = 0.0;
  double tilt_y_deg = 0.0;
  double damping = 0.0;
};

struct IntegratorOptions {
  double dt = 1e-3;
  double stop_speed = 1e-3;
  double max_time = 10.0;
};

Physics FromParams(const EnvParams& params);

// Planar acceleration for position-independent puck dynamics: kinetic
// Coulomb friction opposing velocity, constant wind force, tilt component of
// gravity and linear damping.
std::array<double, 2> Acceleration(const Physics& p, double vx, double vy);

// Integrates a slide with RK4 from rest position `start` and initial velocity
// speed * (cos angle, sin angle) until the speed drops below stop_speed or
// max_time elapses. Returns the end position.
std::array<double, 2> Simulate(const Physics& p, std::array<double, 2> start, double angle,
                               double speed, const IntegratorOptions& options = {});

}  // namespace slide_puck

namespace push_box {

// Quasi-static stand-in for a pushed box with an offset top mass.
inline constexpr double kTravelGain = 0.05;   // m kg / (m/s)
inline constexpr double kHeadingGain = 2.0;   // rad / m
inline constexpr double kRotationGain = 3.0;  // rad / m^2
inline constexpr double kMaxContactOffset = 0.1;
inline constexpr double kWorkspaceSpan = 2.0;

struct Physics {
  double com_offset = 0.0;
  double box_mass = 1.0;
  double box_friction = 1.0;
  double floor_friction = 1.0;
  double pusher_friction = 1.0;
};

struct Outcome {
  double travel = 0.0;
  double heading = 0.0;   // world-frame direction of travel
  double rotation = 0.0;  // change of box yaw
};

Physics FromParams(const EnvParams& params);
Outcome Push(const Physics& p, double contact, double push_angle, double speed);
// state (x, y, sin, cos) -> next state.
Vec Apply(const Physics& p, const Vec& state, double contact, double push_angle, double speed);

}  // namespace push_box

namespace multistep {

inline constexpr double kDt = 0.05;
inline constexpr int kHorizon = 50;
inline constexpr double kWorkspaceSpan = 4.0;

struct Physics {
  double mass = 1.0;
  double drag = 0.5;
  double gain = 1.0;
  double bias_x = 0.0;
  double bias_y = 0.0;
};

Physics FromParams(const EnvParams& params);
// Semi-implicit Euler on (px, py, vx, vy) under a 2D force command.
Vec Step(const Physics& p, const Vec& s, const Vec& a);

// Smoothed random actions (first-order filtered uniform noise) rolled out
// under `nominal`; returns the visited (s, a) pairs.
std::vector<StateAction> BaseRollout(const Family& family, const EnvParams& nominal, int steps,
                                     Rng& rng);

}  // namespace multistep

}  // namespace iida::envsim

#endif  // IIDA_ENVSIM_PHYSICS_H_
