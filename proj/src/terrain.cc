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

#include "evorobogami/terrain.h"

#include <cmath>
#include <numbers>
#include <string>

#include "evorobogami/error.h"

namespace evorobogami {

std::string_view to_string(TerrainKind kind) {
  switch (kind) {
    case TerrainKind::kGround:
      return "ground";
    case TerrainKind::kSine:
      return "sine";
    case TerrainKind::kValley:
      return "valley";
  }
  return "ground";
}

TerrainKind parse_terrain_kind(std::string_view name) {
  if (name == "ground" || name == "g" || name == "G") return TerrainKind::kGround;
  if (name == "sine" || name == "s" || name == "S") return TerrainKind::kSine;
  if (name == "valley" || name == "v" || name == "V") return TerrainKind::kValley;
  throw ConfigError("unknown environment '" + std::string(name) +
                    "' (expected ground|sine|valley)");
}

bool Terrain::in_bounds(double x, double y) const {
  return x >= bounds.x_min && x <= bounds.x_max && y >= bounds.y_min &&
         y <= bounds.y_max;
}

double Terrain::height_at(double x, double y) const {
  if (!in_bounds(x, y)) {
    throw OutOfBoundsError("terrain query (" + std::to_string(x) + ", " +
                           std::to_string(y) + ") outside bounds");
  }
  if (kind_ == TerrainKind::kValley && y > 0.5 * floor_width) return kWallHeight;
  return support_height(x, y);
}

double Terrain::support_height(double x, double y) const {
  switch (kind_) {
    case TerrainKind::kGround:
      return 0.0;
    case TerrainKind::kSine:
      return amplitude * std::sin(2.0 * std::numbers::pi * x / wavelength);
    case TerrainKind::kValley: {
      const double half = 0.5 * floor_width;
      return y < -half ? -y - half : 0.0;
    }
  }
  return 0.0;
}

std::optional<double> Terrain::wall_plane() const {
  if (kind_ != TerrainKind::kValley) return std::nullopt;
  return 0.5 * floor_width;
}

}  // namespace evorobogami
