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

#include "evorobogami/morphology.h"

#include "evorobogami/controller.h"

namespace evorobogami {

double LegPhenotype::length() const {
  double total = 0.0;
  for (const auto& link : links) total += link.length();
  return total;
}

double Morphology::total_mass() const {
  double total = body_mass;
  for (const auto& leg : legs) {
    for (const auto& link : leg.links) total += link.mass;
  }
  return total;
}

Morphology build_phenotype(const Genome& g) {
  require_valid(g);

  Morphology m;
  const auto& body = kBodyShapes[g.body_shape_id - 1];
  for (int i = 0; i < 3; ++i) m.body_dims[i] = body[i] * g.body_scale[i];
  m.body_mass = m.body_dims.prod() * kDensity;

  const auto slots = perimeter_slots(g.num_legs, g.layout_mirror);
  const auto groups = assign_groups(g.num_legs, g.layout_mirror);
  const double half_x = 0.5 * m.body_dims.x();
  const double half_y = 0.5 * m.body_dims.y();

  m.legs.resize(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    LegPhenotype& leg = m.legs[i];
    leg.slot = slots[i];
    leg.group = groups[i];
    // Centred even spacing along x, front to back; attached at mid-height.
    const double fraction =
        (leg.slot.rank + 0.5) / static_cast<double>(leg.slot.side_count);
    leg.attachment = {half_x - fraction * m.body_dims.x(),
                      leg.slot.side == Side::kLeft ? half_y : -half_y, 0.0};
    for (const auto& link : g.legs[i].links) {
      const auto& shape = kLinkShapes[link.shape_id - 1];
      LinkPhenotype lp;
      lp.dims = {shape[0], shape[1], shape[2] * link.length_scale};
      lp.mass = lp.dims.prod() * kDensity;
      leg.links.push_back(lp);
    }
  }
  return m;
}

std::vector<double> leg_lengths(const Morphology& m) {
  std::vector<double> out;
  out.reserve(m.legs.size());
  for (const auto& leg : m.legs) out.push_back(leg.length());
  return out;
}

}  // namespace evorobogami
