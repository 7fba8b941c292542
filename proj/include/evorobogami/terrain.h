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

#ifndef EVOROBOGAMI_TERRAIN_H_
#define EVOROBOGAMI_TERRAIN_H_

#include <optional>
#include <string>
#include <string_view>

namespace evorobogami {

enum class TerrainKind { kGround, kSine, kValley };

std::string_view to_string(TerrainKind kind);
// Accepts "ground"/"sine"/"valley" (also "g"/"s"/"v"); throws ConfigError.
TerrainKind parse_terrain_kind(std::string_view name);

struct Bounds {
  double x_min = -20.0;
  double x_max = 300.0;
  double y_min = -60.0;
  double y_max = 60.0;

  bool operator==(const Bounds&) const = default;
};

// Height for points beyond the valley's vertical wall.
inline constexpr double kWallHeight = 1e6;

// Heightfield environment. +x is forward, +y is to the robot's left, heights
// in cm. The valley has a flat floor of width `floor_width` centred on y = 0, a
// 45 degree slope rising on the right (y < 0) and a vertical wall on the left
// at y = +floor_width / 2.
class Terrain {
 public:
  Terrain() = default;
  explicit Terrain(TerrainKind kind) : kind_(kind) {}

  static Terrain ground() { return Terrain(TerrainKind::kGround); }
  static Terrain sine() { return Terrain(TerrainKind::kSine); }
  static Terrain valley() { return Terrain(TerrainKind::kValley); }

  TerrainKind kind() const { return kind_; }
  double amplitude = 2.0;     // sine, cm
  double wavelength = 30.0;   // sine, cm
  double floor_width = 20.0;  // valley, cm
  Bounds bounds;

  bool in_bounds(double x, double y) const;

  // Surface height; throws OutOfBoundsError outside `bounds`. Returns
  // kWallHeight beyond the valley wall.
  double height_at(double x, double y) const;

  // Height of the walkable surface used by the simulator. Defined everywhere:
  // the surface is extended past the bounds, and beyond the valley wall the
  // floor level at the wall is returned (the wall itself is handled as a
  // lateral constraint, see wall_plane()).
  double support_height(double x, double y) const;

  // y coordinate of the impassable wall plane, if this terrain has one.
  std::optional<double> wall_plane() const;

  bool operator==(const Terrain&) const = default;

 private:
  TerrainKind kind_ = TerrainKind::kGround;
};

}  // namespace evorobogami

#endif  // EVOROBOGAMI_TERRAIN_H_
