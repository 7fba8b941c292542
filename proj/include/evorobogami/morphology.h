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

#ifndef EVOROBOGAMI_MORPHOLOGY_H_
#define EVOROBOGAMI_MORPHOLOGY_H_

#include <vector>

#include <Eigen/Core>

#include "evorobogami/genome.h"

namespace evorobogami {

// Uniform part density, g/cm^3.
inline constexpr double kDensity = 2.5;

struct LinkPhenotype {
  Eigen::Vector3d dims = Eigen::Vector3d::Zero();  // cm; z is the length axis
  double mass = 0.0;                               // g

  double length() const { return dims.z(); }
  bool operator==(const LinkPhenotype& o) const {
    return dims == o.dims && mass == o.mass;
  }
};

// One leg in the body frame (x forward, y left, z up, origin at the body
// centre). All joint axes are parallel to the body y axis; with every joint at
// zero the links hang straight down from the attachment point.
struct LegPhenotype {
  LegSlot slot;
  Eigen::Vector3d attachment = Eigen::Vector3d::Zero();
  std::vector<LinkPhenotype> links;
  int group = 1;

  double length() const;
  bool operator==(const LegPhenotype& o) const {
    return slot == o.slot && attachment == o.attachment && links == o.links &&
           group == o.group;
  }
};

struct Morphology {
  Eigen::Vector3d body_dims = Eigen::Vector3d::Zero();
  double body_mass = 0.0;
  std::vector<LegPhenotype> legs;  // perimeter order

  double total_mass() const;
  bool operator==(const Morphology& o) const {
    return body_dims == o.body_dims && body_mass == o.body_mass &&
           legs == o.legs;
  }
};

// Throws ValidationError for invalid genomes.
Morphology build_phenotype(const Genome& g);

std::vector<double> leg_lengths(const Morphology& m);

}  // namespace evorobogami

#endif  // EVOROBOGAMI_MORPHOLOGY_H_
