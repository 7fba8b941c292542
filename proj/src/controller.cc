// Copyright 2026 The EvoRobogami Authors
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

#include "evorobogami/controller.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evorobogami {

namespace {

// Slack on the timeout so that 600 accumulated 0.005 s ticks count as 3 s.
constexpr double kTimerSlack = 1e-9;

}  // namespace

GaitTable GaitTable::defaults() {
  GaitTable t;
  t.two_link = {{{-0.6, 0.9}, {0.4, 0.3}, {0.0, 0.0}}};
  t.three_link = {{{-0.6, 0.9, -0.3}, {0.4, 0.3, 0.1}, {0.0, 0.0, 0.0}}};
  return t;
}

GaitTable GaitTable::zeros() { return GaitTable{}; }

double GaitTable::target(int links, int motion, int joint) const {
  return links == 2 ? two_link[motion][joint] : three_link[motion][joint];
}

int ControllerState::motion(int group) const {
  return group_sequence(group)[groups[group - 1].step % kNumMotions];
}

std::vector<int> assign_groups(int num_legs, bool /*layout_mirror*/) {
  // The layout flag only changes which physical slots the perimeter visits;
  // grouping alternates along the perimeter either way.
  std::vector<int> groups(num_legs);
  for (int i = 0; i < num_legs; ++i) groups[i] = i % 2 == 0 ? 1 : 2;
  return groups;
}

std::array<int, kNumMotions> group_sequence(int group) {
  if (group == 1) return {0, 1, 2};
  if (group == 2) return {1, 2, 0};
  throw std::invalid_argument("gait group must be 1 or 2");
}

int motion_at(int group, int step) {
  if (step < 1) throw std::invalid_argument("sequence steps are 1-based");
  return group_sequence(group)[(step - 1) % kNumMotions];
}

ControllerState make_controller_state(std::span<const int> links_per_leg,
                                      std::span<const int> groups) {
  if (links_per_leg.size() != groups.size()) {
    throw std::invalid_argument("links_per_leg and groups differ in length");
  }
  ControllerState s;
  s.leg_links.assign(links_per_leg.begin(), links_per_leg.end());
  s.leg_group.assign(groups.begin(), groups.end());
  int joint = 0;
  for (int links : links_per_leg) {
    s.leg_first_joint.push_back(joint);
    joint += links;
  }
  s.joints.resize(joint);
  return s;
}

ControllerStep step_controller(ControllerState& state, const GaitTable& gait,
                               double dt, const ControllerGains& gains) {
  const double vmax = gains.max_velocity;
  const double ilim = gains.integrator_limit;
  const std::array<int, 2> motion{state.motion(1), state.motion(2)};
  std::array<bool, 2> reached{true, true};

  for (std::size_t leg = 0; leg < state.leg_links.size(); ++leg) {
    const int links = state.leg_links[leg];
    const int g = state.leg_group[leg] - 1;
    for (int j = 0; j < links; ++j) {
      JointState& js = state.joints[state.leg_first_joint[leg] + j];
      const double target = gait.target(links, motion[g], j);

      // Outer loop: position PI producing a velocity command.
      const double err = target - js.angle;
      js.position_integral += err * dt;
      js.commanded_velocity =
          std::clamp(gains.kp_position * err +
                         gains.ki_position * js.position_integral,
                     -vmax, vmax);

      // Inner loop: velocity PI, realised as a first-order tracker.
      const double verr = js.commanded_velocity - js.velocity;
      js.velocity_integral =
          std::clamp(js.velocity_integral + verr * dt, -ilim, ilim);
      const double accel =
          gains.kp_velocity * verr + gains.ki_velocity * js.velocity_integral;
      js.velocity = std::clamp(js.velocity + accel * dt, -vmax, vmax);
      js.angle += js.velocity * dt;

      if (std::abs(target - js.angle) > gains.reach_tolerance) reached[g] = false;
    }
  }

  ControllerStep out;
  for (int g = 0; g < 2; ++g) {
    GroupState& gs = state.groups[g];
    if (gs.timer_active) gs.timer += dt;
    out.advanced[g] =
        reached[g] ||
        (gs.timer_active && gs.timer >= gains.switch_timeout - kTimerSlack);
  }
  for (int g = 0; g < 2; ++g) {
    GroupState& gs = state.groups[g];
    if (out.advanced[g]) {
      ++gs.step;
      gs.timer_active = false;
      gs.timer = 0.0;
    }
    if (out.advanced[1 - g]) {
      gs.timer_active = true;
      gs.timer = 0.0;
    }
  }
  if (out.advanced[0] || out.advanced[1]) {
    for (std::size_t leg = 0; leg < state.leg_links.size(); ++leg) {
      if (!out.advanced[state.leg_group[leg] - 1]) continue;
      for (int j = 0; j < state.leg_links[leg]; ++j) {
        state.joints[state.leg_first_joint[leg] + j].position_integral = 0.0;
      }
    }
  }
  return out;
}

}  // namespace evorobogami
