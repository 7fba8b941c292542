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
#include <numbers>

#include "evorobogami/error.h"
#include "evorobogami/terrain.h"

namespace evorobogami {
namespace {

TEST(Terrain, GroundIsFlat) {
  const Terrain t = Terrain::ground();
  EXPECT_EQ(t.height_at(0, 0), 0.0);
  EXPECT_EQ(t.height_at(123.4, -50.0), 0.0);
}

TEST(Terrain, SinePeak) {
  EXPECT_NEAR(Terrain::sine().height_at(7.5, 0), 2.0, 1e-12);
  EXPECT_NEAR(Terrain::sine().height_at(22.5, 30), -2.0, 1e-12);
}

TEST(Terrain, ValleySlopeAndWall) {
  const Terrain t = Terrain::valley();
  EXPECT_EQ(t.height_at(0, -15), 5.0);
  EXPECT_EQ(t.height_at(0, 0), 0.0);
  EXPECT_EQ(t.height_at(0, 10), 0.0);
  EXPECT_EQ(t.height_at(0, 10.5), kWallHeight);
  ASSERT_TRUE(t.wall_plane().has_value());
  EXPECT_EQ(*t.wall_plane(), 10.0);
  EXPECT_FALSE(Terrain::ground().wall_plane().has_value());
  EXPECT_EQ(t.support_height(0, 20), 0.0);
}

TEST(Terrain, Bounds) {
  const Terrain t = Terrain::ground();
  EXPECT_TRUE(t.in_bounds(0, 0));
  EXPECT_TRUE(t.in_bounds(300, 60));
  EXPECT_FALSE(t.in_bounds(301, 0));
  EXPECT_FALSE(t.in_bounds(0, -61));
  EXPECT_FALSE(t.in_bounds(-20.5, 0));
  EXPECT_THROW(t.height_at(301, 0), OutOfBoundsError);
}

TEST(Terrain, GroundAndSineAreSymmetricInY) {
  for (const Terrain& t : {Terrain::ground(), Terrain::sine()}) {
    for (double x = -20; x <= 300; x += 7.3) {
      for (double y = 0; y <= 60; y += 4.1) EXPECT_EQ(t.height_at(x, y), t.height_at(x, -y));
    }
  }
  EXPECT_NE(Terrain::valley().height_at(0, -15), Terrain::valley().height_at(0, 15));
}

TEST(Terrain, ParseKind) {
  EXPECT_EQ(parse_terrain_kind("ground"), TerrainKind::kGround);
  EXPECT_EQ(parse_terrain_kind("s"), TerrainKind::kSine);
  EXPECT_EQ(parse_terrain_kind("valley"), TerrainKind::kValley);
  EXPECT_THROW(parse_terrain_kind("moon"), ConfigError);
  EXPECT_EQ(to_string(TerrainKind::kSine), "sine");
}

TEST(Terrain, OverridesApply) {
  Terrain t = Terrain::sine();
  t.amplitude = 4.0;
  t.wavelength = 40.0;
  EXPECT_NEAR(t.height_at(10, 0), 4.0, 1e-12);
}

}  // namespace
}  // namespace evorobogami
