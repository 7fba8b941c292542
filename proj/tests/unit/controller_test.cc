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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "evorobogami/controller.h"

namespace evorobogami {
namespace {

constexpr double kDt = 0.005;

TEST(Controller, GroupsAlternateAroundPerimeter) {
  EXPECT_EQ(assign_groups(4, false), (std::vector<int>{1, 2, 1, 2}));
  EXPECT_EQ(assign_groups(2, false), (std::vector<int>{1, 2}));
  EXPECT_EQ(assign_groups(5, false), (std::vector<int>{1, 2, 1, 2, 1}));
  EXPECT_EQ(assign_groups(6, true), (std::vector<int>{1, 2, 1, 2, 1, 2}));
}

TEST(Controller, GroupSequences) {
  EXPECT_EQ(group_sequence(1), (std::array<int, 3>{0, 1, 2}));
  EXPECT_EQ(group_sequence(2), (std::array<int, 3>{1, 2, 0}));
  EXPECT_EQ(motion_at(1, 4), 0);
  EXPECT_EQ(motion_at(2, 1), 1);
  EXPECT_EQ(motion_at(2, 3), 0);
}

ControllerState two_legs() {
  const std::vector<int> links{2, 2};
  const std::vector<int> groups{1, 2};
  return make_controller_state(links, groups);
}

TEST(Controller, ReachedGroupAdvances) {
  ControllerState s = two_legs();
  const auto step = step_controller(s, GaitTable::zeros(), kDt);
  EXPECT_TRUE(step.advanced[0]);
  EXPECT_TRUE(step.advanced[1]);
  EXPECT_EQ(s.groups[0].step, 1);
}

TEST(Controller, CommandedVelocityIsClamped) {
  GaitTable gait = GaitTable::zeros();
  for (auto& m : gait.two_link) m = {3.0, 0.0};
  const std::vector<int> links{2};
  const std::vector<int> groups{1};
  ControllerState s = make_controller_state(links, groups);
  step_controller(s, gait, kDt);
  EXPECT_EQ(s.joints[0].commanded_velocity, 2.0);
}

TEST(Controller, StalledGroupIsForcedAfterTimeout) {
  GaitTable gait = GaitTable::zeros();
  for (auto& m : gait.two_link) m = {1.5, 0.0};
  ControllerState s = two_legs();
  s.groups[0].timer_active = true;
  s.groups[0].timer = 3.0 - kDt;
  // Keep the group-2 leg far from its target too, so only the timer acts.
  const auto step = step_controller(s, gait, kDt);
  EXPECT_TRUE(step.advanced[0]);
  EXPECT_FALSE(step.advanced[1]);
  EXPECT_TRUE(s.groups[1].timer_active);
  EXPECT_FALSE(s.groups[0].timer_active);
}

TEST(Controller, VelocityLimitHoldsOverLongRun) {
  const std::vector<int> links{2, 3, 2, 3};
  const std::vector<int> groups{1, 2, 1, 2};
  ControllerState s = make_controller_state(links, groups);
  const GaitTable gait = GaitTable::defaults();
  for (int i = 0; i < 6000; ++i) {
    const std::array<int, 2> before{s.groups[0].step, s.groups[1].step};
    step_controller(s, gait, kDt);
    for (const auto& j : s.joints) {
      ASSERT_LE(std::abs(j.velocity), 2.0);
      ASSERT_LE(std::abs(j.commanded_velocity), 2.0);
    }
    for (int g = 0; g < 2; ++g) ASSERT_LE(s.groups[g].step - before[g], 1);
  }
  EXPECT_GT(s.groups[0].step, 3);
}

TEST(Controller, SameGroupLegsTrackIdentically) {
  const std::vector<int> links{2, 2, 2, 2};
  const std::vector<int> groups{1, 2, 1, 2};
  ControllerState s = make_controller_state(links, groups);
  for (int i = 0; i < 3000; ++i) {
    step_controller(s, GaitTable::defaults(), kDt);
    ASSERT_EQ(s.joints[0].angle, s.joints[4].angle);
    ASSERT_EQ(s.joints[1].angle, s.joints[5].angle);
  }
}

TEST(Controller, TransitionIsDeterministic) {
  ControllerState a = two_legs();
  ControllerState b = two_legs();
  for (int i = 0; i < 1000; ++i) {
    step_controller(a, GaitTable::defaults(), kDt);
    step_controller(b, GaitTable::defaults(), kDt);
  }
  for (std::size_t k = 0; k < a.joints.size(); ++k) EXPECT_EQ(a.joints[k].angle, b.joints[k].angle);
  EXPECT_EQ(a.groups[0].step, b.groups[0].step);
}

TEST(Controller, DefaultTable) {
  const GaitTable t = GaitTable::defaults();
  EXPECT_EQ(t.target(2, 0, 0), -0.6);
  EXPECT_EQ(t.target(2, 0, 1), 0.9);
  EXPECT_EQ(t.target(3, 1, 2), 0.1);
  EXPECT_EQ(t.target(3, 2, 0), 0.0);
}

}  // namespace
}  // namespace evorobogami
