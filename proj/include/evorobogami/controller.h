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

#ifndef EVOROBOGAMI_CONTROLLER_H_
#define EVOROBOGAMI_CONTROLLER_H_

#include <array>
#include <span>
#include <vector>

namespace evorobogami {

inline constexpr int kNumMotions = 3;

// Joint targets (rad) for the three motions M1, M2, M3, per leg type.
// Angles are measured about the body y axis; zero hangs the link straight down
// and positive values swing the distal end forward (+x).
struct GaitTable {
  std::array<std::array<double, 2>, kNumMotions> two_link{};
  std::array<std::array<double, 3>, kNumMotions> three_link{};

  // Lift / swing / stance cycle used unless a gait config is supplied.
  static GaitTable defaults();
  // Every target equal to the starting pose; commands no motion.
  static GaitTable zeros();

  double target(int links, int motion, int joint) const;
  bool operator==(const GaitTable&) const = default;
};

struct ControllerGains {
  double kp_position = 2.0;
  double ki_position = 0.0;
  double kp_velocity = 10.0;
  double ki_velocity = 0.3;
  double max_velocity = 2.0;      // rad/s
  double integrator_limit = 2.0;  // velocity-loop anti-windup
  double reach_tolerance = 0.01;  // rad
  double switch_timeout = 3.0;    // s
};

struct JointState {
  double angle = 0.0;
  double velocity = 0.0;
  double commanded_velocity = 0.0;
  double position_integral = 0.0;
  double velocity_integral = 0.0;
};

struct GroupState {
  int step = 0;             // motions completed; current motion = sequence[step % 3]
  bool timer_active = false;
  double timer = 0.0;       // s since the other group last finished a motion
};

struct ControllerState {
  std::vector<JointState> joints;
  std::vector<int> leg_group;        // 1 or 2
  std::vector<int> leg_links;        // 2 or 3
  std::vector<int> leg_first_joint;  // offset into `joints`
  std::array<GroupState, 2> groups{};

  int motion(int group) const;
};

// Group ids in perimeter order: alternating 1, 2, ... from the front-left leg.
std::vector<int> assign_groups(int num_legs, bool layout_mirror);

// Motion order for a group; group 1 runs M1 M2 M3, group 2 runs M2 M3 M1.
// Values are motion indices 0..2 (M1..M3).
std::array<int, kNumMotions> group_sequence(int group);

// Motion index at 1-based position `step` of a group's repeating sequence.
int motion_at(int group, int step);

ControllerState make_controller_state(std::span<const int> links_per_leg,
                                      std::span<const int> groups);

struct ControllerStep {
  std::array<bool, 2> advanced{false, false};
};

// Advances every joint by one tick of the cascaded position/velocity loop and
// applies the group switching rule: a group moves to its next motion once
// every joint is within the reach tolerance of its target, or once the other
// group has finished a motion `switch_timeout` seconds ago.
ControllerStep step_controller(ControllerState& state, const GaitTable& gait,
                               double dt, const ControllerGains& gains = {});

}  // namespace evorobogami

#endif  // EVOROBOGAMI_CONTROLLER_H_
