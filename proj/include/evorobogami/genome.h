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

#ifndef EVOROBOGAMI_GENOME_H_
#define EVOROBOGAMI_GENOME_H_

#include <array>
#include <string>
#include <vector>

#include "evorobogami/rng.h"

namespace evorobogami {

// Allele ranges.
inline constexpr int kMinBodyShape = 1;
inline constexpr int kMaxBodyShape = 6;
inline constexpr int kMinLegs = 2;
inline constexpr int kMaxLegs = 6;
inline constexpr int kMinLinks = 2;
inline constexpr int kMaxLinks = 3;
inline constexpr int kMinLinkShape = 1;
inline constexpr int kMaxLinkShape = 7;
inline constexpr double kMinScale = 0.5;
inline constexpr double kMaxScale = 1.5;

// Part dimensions in cm, indexed by shape id - 1. Columns are X, Y, Z.
inline constexpr std::array<std::array<double, 3>, 6> kBodyShapes{{
    {10, 10, 4},
    {15, 10, 4},
    {20, 10, 4},
    {10, 5, 4},
    {15, 5, 4},
    {7, 5, 4},
}};
inline constexpr std::array<std::array<double, 3>, 7> kLinkShapes{{
    {1, 1, 4},
    {4, 1, 4},
    {1, 4, 4},
    {1, 4, 2},
    {1, 4, 7},
    {1, 1, 7},
    {1, 1, 10},
}};

// Feature-space extremes over all valid genomes.
inline constexpr double kMinBodyLengthX = 3.5;   // 7 * 0.5
inline constexpr double kMaxBodyLengthX = 30.0;  // 20 * 1.5
inline constexpr double kMinLegLengthStd = 0.0;
inline constexpr double kMaxLegLengthStd = 21.5;  // std of {2, 45}

struct LinkGenome {
  int shape_id = 4;
  double length_scale = 1.0;

  bool operator==(const LinkGenome&) const = default;
};

struct LegGenome {
  std::vector<LinkGenome> links;

  bool operator==(const LegGenome&) const = default;
};

// Direct encoding of a legged robot. `legs` is in perimeter order (see
// morphology.h): front-left first, then the right side front to back, then
// the remaining left legs back to front.
struct Genome {
  int body_shape_id = 3;
  std::array<double, 3> body_scale{1.0, 1.0, 1.0};
  int num_legs = 4;
  bool layout_mirror = false;
  std::vector<LegGenome> legs;

  bool operator==(const Genome&) const = default;
};

struct FeatureDescriptor {
  double body_length_x = 0.0;  // cm
  double leg_length_std = 0.0;  // cm

  bool operator==(const FeatureDescriptor&) const = default;
};

// Returns every violated range/shape constraint; empty means valid.
std::vector<std::string> validate(const Genome& g);

// Throws ValidationError when `g` is invalid.
void require_valid(const Genome& g);

Genome neutral_genome();
Genome random_genome(Rng& rng);

// Per-gene draw counts reported by mutate(). A "draw" is the event of the
// gene being selected for mutation, whether or not its value changed.
struct MutationReport {
  int genes_visited = 0;
  int genes_drawn = 0;
};

// Gene-wise mutation. Integer and boolean genes are resampled over their
// full range; real genes get a uniform kick of up to 10% of the range width
// and are clamped. Changing num_legs grows (copying the last leg) or trims the
// tail; changing a leg's link count copies or drops its last link.
Genome mutate(const Genome& g, double rate, Rng& rng,
              MutationReport* report = nullptr);

// Leg-aligned uniform crossover. The structural genes (num_legs,
// layout_mirror) come from one parent chosen by a fair coin.
Genome crossover(const Genome& a, const Genome& b, Rng& rng);

double leg_length(const LegGenome& leg);
FeatureDescriptor features(const Genome& g);

// Reflects the robot across its sagittal plane: left and right legs trade
// sides, and for odd leg counts the layout flag flips so the side with the
// extra leg switches.
Genome mirror(const Genome& g);

// Number of legs on each side for a given count and layout flag.
struct SideCounts {
  int left = 0;
  int right = 0;
};
SideCounts side_counts(int num_legs, bool layout_mirror);

enum class Side { kLeft, kRight };

// Where the leg at a perimeter index sits on the body. `rank` counts from the
// front of its side (0 = frontmost).
struct LegSlot {
  Side side = Side::kLeft;
  int rank = 0;
  int side_count = 1;

  bool operator==(const LegSlot&) const = default;
};

// Perimeter walk used for leg order and gait groups: front-left, down the
// right side front to back, then up the left side back to front.
std::vector<LegSlot> perimeter_slots(int num_legs, bool layout_mirror);

}  // namespace evorobogami

#endif  // EVOROBOGAMI_GENOME_H_
