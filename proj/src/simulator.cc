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

#include "evorobogami/simulator.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "evorobogami/error.h"

namespace evorobogami {

namespace {

using Eigen::Vector2d;
using Eigen::Vector3d;

Vector2d rotate(double c, double s, const Vector2d& p) {
  return {c * p.x() - s * p.y(), s * p.x() + c * p.y()};
}

bool finite(const Pose& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) &&
         std::isfinite(p.yaw);
}

}  // namespace

int SimConfig::total_steps() const {
  return static_cast<int>(std::lround(duration / dt));
}

int SimConfig::frame_stride() const {
  return std::max(1, static_cast<int>(std::lround(frame_interval / dt)));
}

Vector2d PlanarTransform::apply(const Vector2d& p) const {
  return rotate(std::cos(rotation), std::sin(rotation), p) + translation;
}

PlanarTransform register_planar(std::span<const Vector2d> from,
                                std::span<const Vector2d> to) {
  if (from.empty() || from.size() != to.size()) {
    throw std::invalid_argument("register_planar needs matching non-empty sets");
  }
  PlanarTransform t;
  if (from.size() == 1) {
    t.translation = to[0] - from[0];
    return t;
  }
  const double n = static_cast<double>(from.size());
  Vector2d pc = Vector2d::Zero();
  Vector2d qc = Vector2d::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    pc += from[i];
    qc += to[i];
  }
  pc /= n;
  qc /= n;
  double cross = 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    const Vector2d a = from[i] - pc;
    const Vector2d b = to[i] - qc;
    cross += a.x() * b.y() - a.y() * b.x();
    dot += a.x() * b.x() + a.y() * b.y();
  }
  t.rotation = (cross == 0.0 && dot == 0.0) ? 0.0 : std::atan2(cross, dot);
  t.translation = qc - rotate(std::cos(t.rotation), std::sin(t.rotation), pc);
  return t;
}

double fitness(double dx, double dy) { return dx - 0.5 * std::abs(dy); }

Simulation::Simulation(Morphology morphology, const Terrain& terrain,
                       SimConfig config)
    : morphology_(std::move(morphology)),
      terrain_(terrain),
      config_(std::move(config)) {
  for (const auto& leg : morphology_.legs) {
    LegCache cache;
    cache.attachment = leg.attachment;
    for (const auto& link : leg.links) cache.link_lengths.push_back(link.length());
    legs_.push_back(std::move(cache));
    groups_.push_back(leg.group);
    links_per_leg_.push_back(static_cast<int>(leg.links.size()));
  }
  if (config_.group_override) {
    if (config_.group_override->size() != legs_.size()) {
      throw std::invalid_argument("group_override size must match leg count");
    }
    groups_ = *config_.group_override;
  }
}

Vector3d Simulation::foot_body(std::size_t leg,
                               const ControllerState& c) const {
  const LegCache& cache = legs_[leg];
  const int first = c.leg_first_joint[leg];
  double phi = 0.0;
  double fx = 0.0;
  double fz = 0.0;
  for (std::size_t j = 0; j < cache.link_lengths.size(); ++j) {
    phi += c.joints[first + j].angle;
    fx += cache.link_lengths[j] * std::sin(phi);
    fz -= cache.link_lengths[j] * std::cos(phi);
  }
  return cache.attachment + Vector3d(fx, 0.0, fz);
}

std::vector<Vector3d> Simulation::feet_body(const ControllerState& c) const {
  std::vector<Vector3d> out;
  out.reserve(legs_.size());
  for (std::size_t i = 0; i < legs_.size(); ++i) out.push_back(foot_body(i, c));
  return out;
}

std::vector<Vector3d> Simulation::feet_world(const SimState& s) const {
  const double c = std::cos(s.pose.yaw);
  const double sn = std::sin(s.pose.yaw);
  std::vector<Vector3d> out;
  for (const auto& f : feet_body(s.controller)) {
    const Vector2d xy = rotate(c, sn, f.head<2>());
    out.emplace_back(s.pose.x + xy.x(), s.pose.y + xy.y(), s.pose.z + f.z());
  }
  return out;
}

SimState Simulation::initial_pose() const {
  SimState s;
  s.controller = make_controller_state(links_per_leg_, groups_);
  s.anchors.assign(legs_.size(), std::nullopt);

  std::size_t longest = 0;
  for (std::size_t i = 1; i < morphology_.legs.size(); ++i) {
    if (morphology_.legs[i].length() > morphology_.legs[longest].length()) {
      longest = i;
    }
  }
  const LegPhenotype& leg = morphology_.legs[longest];
  const double ground =
      terrain_.support_height(leg.attachment.x(), leg.attachment.y());
  s.pose.z = ground + config_.start_clearance + leg.length() - leg.attachment.z();
  return s;
}

void Simulation::step(SimState& s) const {
  const SimConfig& cfg = config_;
  const std::size_t n = legs_.size();
  step_controller(s.controller, cfg.gait, cfg.dt, cfg.gains);

  // Foot tips at the new joint angles, placed with the pre-step pose.
  std::array<Vector3d, kMaxLegs> body_feet;
  std::array<Vector2d, kMaxLegs> tentative;
  const double c0 = std::cos(s.pose.yaw);
  const double s0 = std::sin(s.pose.yaw);
  const Vector2d origin(s.pose.x, s.pose.y);
  for (std::size_t i = 0; i < n; ++i) {
    body_feet[i] = foot_body(i, s.controller);
    tentative[i] = origin + rotate(c0, s0, body_feet[i].head<2>());
  }

  // Contact: pin feet that reach the surface, release the others.
  std::array<Vector2d, kMaxLegs> from;
  std::array<Vector2d, kMaxLegs> to;
  std::size_t anchored = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = s.pose.z + body_feet[i].z() -
                       terrain_.support_height(tentative[i].x(), tentative[i].y());
    if (gap <= cfg.contact_threshold) {
      if (!s.anchors[i]) s.anchors[i] = tentative[i];
      from[anchored] = tentative[i];
      to[anchored] = *s.anchors[i];
      ++anchored;
    } else {
      s.anchors[i].reset();
    }
  }

  // Horizontal motion from the anchored feet.
  Vector2d delta = Vector2d::Zero();
  double dyaw = 0.0;
  if (anchored > 0) {
    const PlanarTransform t = register_planar(
        std::span<const Vector2d>(from.data(), anchored),
        std::span<const Vector2d>(to.data(), anchored));
    dyaw = t.rotation;
    delta = t.apply(origin) - origin;
  }

  const Vector3d& dims = morphology_.body_dims;
  const std::array<Vector2d, 5> footprint{
      Vector2d(0.5 * dims.x(), 0.5 * dims.y()),
      Vector2d(0.5 * dims.x(), -0.5 * dims.y()),
      Vector2d(-0.5 * dims.x(), 0.5 * dims.y()),
      Vector2d(-0.5 * dims.x(), -0.5 * dims.y()), Vector2d::Zero()};

  // Sliding contact with the wall: drop the lateral component, then the
  // rotation, if either would push a body or foot point through the plane.
  if (const auto wall = terrain_.wall_plane()) {
    auto crosses = [&](const Vector2d& d, double yaw_step) {
      const double yaw = s.pose.yaw + yaw_step;
      const double c = std::cos(yaw);
      const double sn = std::sin(yaw);
      const Vector2d o = origin + d;
      for (std::size_t i = 0; i < n; ++i) {
        const double y0 = tentative[i].y();
        const double y1 = (o + rotate(c, sn, body_feet[i].head<2>())).y();
        if (y1 > *wall && y1 > y0) return true;
      }
      for (std::size_t k = 0; k < 4; ++k) {
        if ((o + rotate(c, sn, footprint[k])).y() > *wall) return true;
      }
      return false;
    };
    if (crosses(delta, dyaw)) {
      delta.y() = 0.0;
      if (crosses(delta, dyaw)) dyaw = 0.0;
    }
  }

  Pose next = s.pose;
  next.x += delta.x();
  next.y += delta.y();
  next.yaw += dyaw;

  // Gap of every foot below a body at height z = 0 in the new pose.
  const double c1 = std::cos(next.yaw);
  const double s1 = std::sin(next.yaw);
  std::array<double, kMaxLegs> offset;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector2d p = Vector2d(next.x, next.y) + rotate(c1, s1, body_feet[i].head<2>());
    offset[i] = body_feet[i].z() - terrain_.support_height(p.x(), p.y());
  }

  if (anchored > 0) {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (s.anchors[i]) lowest = std::min(lowest, offset[i]);
    }
    next.z = -lowest;
    s.vz = 0.0;
  } else {
    s.vz -= cfg.gravity * cfg.dt;
    next.z += s.vz * cfg.dt;
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) lowest = std::min(lowest, offset[i]);
    if (next.z + lowest < 0.0) {
      next.z = -lowest;
      s.vz = 0.0;
    }
  }

  // Belly contact: rest on the surface and drag.
  double surface = -std::numeric_limits<double>::infinity();
  for (const auto& corner : footprint) {
    const Vector2d p = Vector2d(next.x, next.y) + rotate(c1, s1, corner);
    surface = std::max(surface, terrain_.support_height(p.x(), p.y()));
  }
  const double underside = next.z - 0.5 * dims.z();
  s.body_contact = underside <= surface;
  if (s.body_contact) {
    next.z = std::max(next.z, surface + 0.5 * dims.z());
    next.x = s.pose.x + cfg.drag * delta.x();
    next.y = s.pose.y + cfg.drag * delta.y();
    s.vz = 0.0;
  }

  s.pose = next;
  ++s.steps;
  if (!finite(s.pose) || !std::isfinite(s.vz)) {
    throw SimulationFault("non-finite simulation state at step " +
                          std::to_string(s.steps));
  }
}

bool Simulation::fell_off(const SimState& s) const {
  if (!terrain_.in_bounds(s.pose.x, s.pose.y)) return true;
  return s.pose.z < terrain_.support_height(s.pose.x, s.pose.y) - config_.kill_depth;
}

Frame Simulation::frame(const SimState& s) const {
  Frame f;
  f.t = s.elapsed(config_.dt);
  f.pose = s.pose;
  f.joint_angles.reserve(s.controller.joints.size());
  for (const auto& j : s.controller.joints) f.joint_angles.push_back(j.angle);
  return f;
}

SimResult Simulation::run() const {
  SimState s = initial_pose();
  const Pose start = s.pose;
  const int steps = config_.total_steps();
  const int stride = config_.frame_stride();

  SimResult r;
  if (config_.record_frames) {
    r.frames.reserve(steps / stride + 1);
    r.frames.push_back(frame(s));
  }
  while (s.steps < steps) {
    step(s);
    if (config_.record_frames && s.steps % stride == 0) r.frames.push_back(frame(s));
    if (fell_off(s)) {
      r.fell_off = true;
      if (config_.record_frames && s.steps % stride != 0) {
        r.frames.push_back(frame(s));
      }
      break;
    }
  }
  r.steps = s.steps;
  r.dx = s.pose.x - start.x;
  r.dy = s.pose.y - start.y;
  r.fitness = fitness(r.dx, r.dy);
  return r;
}

SimState initial_pose(const Morphology& m, const Terrain& t,
                      const SimConfig& cfg) {
  return Simulation(m, t, cfg).initial_pose();
}

SimResult simulate(const Genome& g, const Terrain& t, const SimConfig& cfg) {
  return Simulation(build_phenotype(g), t, cfg).run();
}

}  // namespace evorobogami
