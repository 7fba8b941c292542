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

#ifndef EVOROBOGAMI_SIMULATOR_H_
#define EVOROBOGAMI_SIMULATOR_H_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "evorobogami/controller.h"
#include "evorobogami/genome.h"
#include "evorobogami/morphology.h"
#include "evorobogami/terrain.h"

namespace evorobogami {

// Quasi-static anchor model of legged locomotion.
//
// Feet that touch the terrain pin a world point (infinite friction). Each step
// the body moves by the planar rigid transform that best keeps the pinned
// feet on their anchors, then is lowered or raised so the lowest pinned foot
// sits on the surface. Roll and pitch stay at zero. With no foot in contact
// the body falls ballistically. Belly contact scales horizontal motion by a
// drag factor; the valley wall blocks lateral motion through it.
struct SimConfig {
  double dt = 0.005;             // s
  double duration = 30.0;        // s
  double frame_interval = 0.05;  // s
  double start_clearance = 2.0;  // cm, longest foot above terrain at t = 0
  double contact_threshold = 0.25;  // cm
  double drag = 0.3;
  double gravity = 981.0;   // cm/s^2
  double kill_depth = 5.0;  // cm below the surface counts as a fall
  GaitTable gait = GaitTable::defaults();
  ControllerGains gains;
  bool record_frames = false;
  // Replaces the perimeter grouping; used to study gait symmetry.
  std::optional<std::vector<int>> group_override;

  int total_steps() const;
  int frame_stride() const;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;

  bool operator==(const Pose&) const = default;
};

struct SimState {
  Pose pose;
  double vz = 0.0;  // cm/s, only used while no foot is anchored
  ControllerState controller;
  std::vector<std::optional<Eigen::Vector2d>> anchors;  // per foot
  int steps = 0;
  bool body_contact = false;

  double elapsed(double dt) const { return steps * dt; }
};

struct Frame {
  double t = 0.0;
  Pose pose;
  std::vector<double> joint_angles;

  bool operator==(const Frame&) const = default;
};

struct SimResult {
  double fitness = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  bool fell_off = false;
  int steps = 0;
  std::vector<Frame> frames;

  bool operator==(const SimResult&) const = default;
};

// Least-squares planar rigid transform: q ~= R(rotation) p + translation.
struct PlanarTransform {
  double rotation = 0.0;
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  Eigen::Vector2d apply(const Eigen::Vector2d& p) const;
};

// One point gives a pure translation; two or more solve the 2-D Procrustes
// problem in closed form. `from` and `to` must be the same non-zero length.
PlanarTransform register_planar(std::span<const Eigen::Vector2d> from,
                                std::span<const Eigen::Vector2d> to);

// Straight-line walking objective: forward distance minus half the lateral
// drift.
double fitness(double dx, double dy);

// A morphology placed on a terrain, ready to be stepped.
class Simulation {
 public:
  Simulation(Morphology morphology, const Terrain& terrain, SimConfig config);

  const Morphology& morphology() const { return morphology_; }
  const Terrain& terrain() const { return terrain_; }
  const SimConfig& config() const { return config_; }

  // All joints at zero, body at the origin with the longest leg's foot
  // `start_clearance` above the surface beneath it.
  SimState initial_pose() const;

  // One fixed time step. Throws SimulationFault on a non-finite state.
  void step(SimState& state) const;

  // Foot tips in body coordinates for the current joint angles.
  std::vector<Eigen::Vector3d> feet_body(const ControllerState& c) const;
  std::vector<Eigen::Vector3d> feet_world(const SimState& s) const;

  bool fell_off(const SimState& s) const;
  Frame frame(const SimState& s) const;

  // initial_pose followed by stepping for the configured duration, stopping
  // early when the body leaves the terrain bounds or drops through the kill
  // plane.
  SimResult run() const;

 private:
  struct LegCache {
    Eigen::Vector3d attachment;
    std::vector<double> link_lengths;
  };

  Eigen::Vector3d foot_body(std::size_t leg, const ControllerState& c) const;

  Morphology morphology_;
  Terrain terrain_;
  SimConfig config_;
  std::vector<LegCache> legs_;
  std::vector<int> groups_;
  std::vector<int> links_per_leg_;
};

SimState initial_pose(const Morphology& m, const Terrain& t,
                      const SimConfig& cfg = {});

// Throws ValidationError for an invalid genome.
SimResult simulate(const Genome& g, const Terrain& t, const SimConfig& cfg = {});

}  // namespace evorobogami

#endif  // EVOROBOGAMI_SIMULATOR_H_
