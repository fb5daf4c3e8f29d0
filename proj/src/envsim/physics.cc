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

#include "iida/envsim/physics.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace iida::envsim {

namespace slide_puck {

Physics FromParams(const EnvParams& params) {
  const auto& v = params.values;
  if (v.size() != 8) throw RangeError("slidepuck: expected 8 factors");
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

std::array<double, 2> Acceleration(const Physics& p, double vx, double vy) {
  constexpr double kDegToRad = std::numbers::pi / 180.0;
  const double mu = p.floor_friction + p.puck_friction;
  const double speed = std::hypot(vx, vy);
  double ax = (kWindCoupling * p.wind_x - p.damping * vx) / p.mass +
              kGravity * std::sin(p.tilt_x_deg * kDegToRad);
  double ay = (kWindCoupling * p.wind_y - p.damping * vy) / p.mass +
              kGravity * std::sin(p.tilt_y_deg * kDegToRad);
  if (speed > 0.0) {
    ax -= mu * kGravity * vx / speed;
    ay -= mu * kGravity * vy / speed;
  }
  return {ax, ay};
}

std::array<double, 2> Simulate(const Physics& p, std::array<double, 2> start, double angle,
                               double speed, const IntegratorOptions& options) {
  double x = start[0], y = start[1];
  double vx = speed * std::cos(angle), vy = speed * std::sin(angle);
  if (std::hypot(vx, vy) < options.stop_speed) return {x, y};
  const double h = options.dt;
  const long max_steps = std::lround(options.max_time / h);
  for (long k = 0; k < max_steps; ++k) {
    const auto a1 = Acceleration(p, vx, vy);
    const double vx2 = vx + 0.5 * h * a1[0], vy2 = vy + 0.5 * h * a1[1];
    const auto a2 = Acceleration(p, vx2, vy2);
    const double vx3 = vx + 0.5 * h * a2[0], vy3 = vy + 0.5 * h * a2[1];
    const auto a3 = Acceleration(p, vx3, vy3);
    const double vx4 = vx + h * a3[0], vy4 = vy + h * a3[1];
    const auto a4 = Acceleration(p, vx4, vy4);
    x += h / 6.0 * (vx + 2.0 * vx2 + 2.0 * vx3 + vx4);
    y += h / 6.0 * (vy + 2.0 * vy2 + 2.0 * vy3 + vy4);
    vx += h / 6.0 * (a1[0] + 2.0 * a2[0] + 2.0 * a3[0] + a4[0]);
    vy += h / 6.0 * (a1[1] + 2.0 * a2[1] + 2.0 * a3[1] + a4[1]);
    if (std::hypot(vx, vy) < options.stop_speed) break;
  }
  return {x, y};
}

}  // namespace slide_puck

namespace push_box {

Physics FromParams(const EnvParams& params) {
  const auto& v = params.values;
  if (v.size() != 5) throw RangeError("pushbox: expected 5 factors");
  return {v[0], v[1], v[2], v[3], v[4]};
}

Outcome Push(const Physics& p, double contact, double push_angle, double speed) {
  // Off-centre contact loses part of the push, more so with a grippy pusher.
  const double off_centre = contact / kMaxContactOffset;
  const double efficiency = 1.0 - 0.5 * off_centre * off_centre * p.pusher_friction;
  const double floor_mu = std::sqrt(p.box_friction * p.floor_friction);
  Outcome out;
  out.travel = kTravelGain * speed * efficiency / (p.box_mass * floor_mu);
  out.heading = push_angle + kHeadingGain * p.com_offset;
  out.rotation = kRotationGain * p.com_offset * out.travel;
  return out;
}

Vec Apply(const Physics& p, const Vec& state, double contact, double push_angle, double speed) {
  const Outcome o = Push(p, contact, push_angle, speed);
  const double theta = std::atan2(state[2], state[3]) + o.rotation;
  return {state[0] + o.travel * std::cos(o.heading), state[1] + o.travel * std::sin(o.heading),
          std::sin(theta), std::cos(theta)};
}

}  // namespace push_box

namespace multistep {

Physics FromParams(const EnvParams& params) {
  const auto& v = params.values;
  if (v.size() != 5) throw RangeError("multistep: expected 5 factors");
  return {v[0], v[1], v[2], v[3], v[4]};
}

Vec Step(const Physics& p, const Vec& s, const Vec& a) {
  const double vx = s[2] + kDt * (p.gain * a[0] - p.drag * s[2] + p.bias_x) / p.mass;
  const double vy = s[3] + kDt * (p.gain * a[1] - p.drag * s[3] + p.bias_y) / p.mass;
  return {s[0] + kDt * vx, s[1] + kDt * vy, vx, vy};
}

std::vector<StateAction> BaseRollout(const Family& family, const EnvParams& nominal, int steps,
                                     Rng& rng) {
  const Physics p = FromParams(nominal);
  std::vector<StateAction> out;
  Vec s = family.SampleState(rng);
  s[2] = s[3] = 0.0;
  Vec a = {0.0, 0.0};
  for (int t = 0; t < steps; ++t) {
    for (double& ai : a) ai = std::clamp(0.8 * ai + 0.6 * Uniform(rng, -1.0, 1.0), -1.0, 1.0);
    out.push_back({s, a});
    s = Step(p, s, a);
  }
  return out;
}

}  // namespace multistep

}  // namespace iida::envsim
