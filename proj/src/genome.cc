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

#include "evorobogami/genome.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "evorobogami/error.h"

namespace evorobogami {

namespace {

constexpr double kScaleKick = 0.1 * (kMaxScale - kMinScale);

bool in_range(double v, double lo, double hi) {
  return std::isfinite(v) && v >= lo && v <= hi;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

double kick_scale(double v, Rng& rng) {
  return std::clamp(v + rng.uniform(-kScaleKick, kScaleKick), kMinScale,
                    kMaxScale);
}

LinkGenome random_link(Rng& rng) {
  LinkGenome link;
  link.shape_id = rng.uniform_int(kMinLinkShape, kMaxLinkShape);
  link.length_scale = rng.uniform(kMinScale, kMaxScale);
  return link;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::invalid_argument("invalid genome: " + join(violations)),
      violations_(std::move(violations)) {}

std::vector<std::string> validate(const Genome& g) {
  std::vector<std::string> out;
  if (g.body_shape_id < kMinBodyShape || g.body_shape_id > kMaxBodyShape) {
    out.push_back("body_shape_id out of 1-6");
  }
  static constexpr const char* kAxes[] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) {
    if (!in_range(g.body_scale[i], kMinScale, kMaxScale)) {
      out.push_back(std::string("body_scale.") + kAxes[i] +
                    " out of [0.5, 1.5]");
    }
  }
  if (g.num_legs < kMinLegs || g.num_legs > kMaxLegs) {
    out.push_back("num_legs out of 2-6");
  }
  if (static_cast<int>(g.legs.size()) != g.num_legs) {
    out.push_back("legs length mismatch");
  }
  for (std::size_t i = 0; i < g.legs.size(); ++i) {
    const auto& leg = g.legs[i];
    const std::string prefix = "legs[" + std::to_string(i) + "]";
    const int n = static_cast<int>(leg.links.size());
    if (n < kMinLinks || n > kMaxLinks) {
      out.push_back(prefix + " link count out of 2-3");
    }
    for (std::size_t j = 0; j < leg.links.size(); ++j) {
      const auto& link = leg.links[j];
      const std::string lp = prefix + ".links[" + std::to_string(j) + "]";
      if (link.shape_id < kMinLinkShape || link.shape_id > kMaxLinkShape) {
        out.push_back(lp + ".shape_id out of 1-7");
      }
      if (!in_range(link.length_scale, kMinScale, kMaxScale)) {
        out.push_back(lp + ".length_scale out of [0.5, 1.5]");
      }
    }
  }
  return out;
}

void require_valid(const Genome& g) {
  auto violations = validate(g);
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

Genome neutral_genome() {
  Genome g;
  g.body_shape_id = 3;
  g.body_scale = {1.0, 1.0, 1.0};
  g.num_legs = 4;
  g.layout_mirror = false;
  LegGenome leg;
  leg.links.assign(2, LinkGenome{4, 1.0});
  g.legs.assign(4, leg);
  return g;
}

Genome random_genome(Rng& rng) {
  Genome g;
  g.body_shape_id = rng.uniform_int(kMinBodyShape, kMaxBodyShape);
  for (auto& s : g.body_scale) s = rng.uniform(kMinScale, kMaxScale);
  g.num_legs = rng.uniform_int(kMinLegs, kMaxLegs);
  g.layout_mirror = rng.coin();
  g.legs.resize(g.num_legs);
  for (auto& leg : g.legs) {
    const int links = rng.uniform_int(kMinLinks, kMaxLinks);
    for (int j = 0; j < links; ++j) leg.links.push_back(random_link(rng));
  }
  return g;
}

Genome mutate(const Genome& g, double rate, Rng& rng, MutationReport* report) {
  MutationReport local;
  MutationReport& rep = report ? *report : local;
  auto draw = [&]() {
    ++rep.genes_visited;
    const bool hit = rng.bernoulli(rate);
    if (hit) ++rep.genes_drawn;
    return hit;
  };

  Genome out = g;
  if (draw()) out.body_shape_id = rng.uniform_int(kMinBodyShape, kMaxBodyShape);
  for (auto& s : out.body_scale) {
    if (draw()) s = kick_scale(s, rng);
  }
  if (draw()) {
    out.num_legs = rng.uniform_int(kMinLegs, kMaxLegs);
    while (static_cast<int>(out.legs.size()) < out.num_legs) {
      out.legs.push_back(out.legs.back());
    }
    out.legs.resize(out.num_legs);
  }
  if (draw()) out.layout_mirror = rng.coin();
  for (auto& leg : out.legs) {
    if (draw()) {
      const int links = rng.uniform_int(kMinLinks, kMaxLinks);
      while (static_cast<int>(leg.links.size()) < links) {
        leg.links.push_back(leg.links.back());
      }
      leg.links.resize(links);
    }
    for (auto& link : leg.links) {
      if (draw()) link.shape_id = rng.uniform_int(kMinLinkShape, kMaxLinkShape);
      if (draw()) link.length_scale = kick_scale(link.length_scale, rng);
    }
  }
  return out;
}

Genome crossover(const Genome& a, const Genome& b, Rng& rng) {
  const Genome& structural = rng.coin() ? a : b;
  Genome child;
  child.num_legs = structural.num_legs;
  child.layout_mirror = structural.layout_mirror;
  child.body_shape_id = rng.coin() ? a.body_shape_id : b.body_shape_id;
  for (int i = 0; i < 3; ++i) {
    child.body_scale[i] = rng.coin() ? a.body_scale[i] : b.body_scale[i];
  }
  child.legs.reserve(child.num_legs);
  for (int i = 0; i < child.num_legs; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (idx < a.legs.size() && idx < b.legs.size()) {
      child.legs.push_back(rng.coin() ? a.legs[idx] : b.legs[idx]);
    } else {
      child.legs.push_back(structural.legs[idx]);
    }
  }
  return child;
}

double leg_length(const LegGenome& leg) {
  double total = 0.0;
  for (const auto& link : leg.links) {
    total += kLinkShapes[link.shape_id - 1][2] * link.length_scale;
  }
  return total;
}

FeatureDescriptor features(const Genome& g) {
  FeatureDescriptor f;
  f.body_length_x = kBodyShapes[g.body_shape_id - 1][0] * g.body_scale[0];

  std::vector<double> lengths;
  lengths.reserve(g.legs.size());
  for (const auto& leg : g.legs) lengths.push_back(leg_length(leg));
  if (lengths.empty()) return f;
  // Sorted so that any reordering of the legs (e.g. mirror) gives the same bits.
  std::sort(lengths.begin(), lengths.end());
  if (lengths.front() == lengths.back()) return f;

  const double n = static_cast<double>(lengths.size());
  double mean = 0.0;
  for (double l : lengths) mean += l;
  mean /= n;
  double ss = 0.0;
  for (double l : lengths) ss += (l - mean) * (l - mean);
  f.leg_length_std = std::sqrt(ss / n);
  return f;
}

SideCounts side_counts(int num_legs, bool layout_mirror) {
  SideCounts c{num_legs / 2, num_legs / 2};
  if (num_legs % 2 != 0) {
    if (layout_mirror) {
      ++c.left;
    } else {
      ++c.right;
    }
  }
  return c;
}

std::vector<LegSlot> perimeter_slots(int num_legs, bool layout_mirror) {
  const SideCounts c = side_counts(num_legs, layout_mirror);
  std::vector<LegSlot> slots;
  slots.reserve(num_legs);
  slots.push_back({Side::kLeft, 0, c.left});
  for (int r = 0; r < c.right; ++r) slots.push_back({Side::kRight, r, c.right});
  for (int r = c.left - 1; r >= 1; --r) slots.push_back({Side::kLeft, r, c.left});
  return slots;
}

Genome mirror(const Genome& g) {
  Genome out = g;
  if (g.num_legs % 2 != 0) out.layout_mirror = !g.layout_mirror;

  const auto from = perimeter_slots(g.num_legs, g.layout_mirror);
  const auto to = perimeter_slots(out.num_legs, out.layout_mirror);
  for (std::size_t i = 0; i < to.size(); ++i) {
    const Side source_side =
        to[i].side == Side::kLeft ? Side::kRight : Side::kLeft;
    const auto it = std::find_if(from.begin(), from.end(), [&](const LegSlot& s) {
      return s.side == source_side && s.rank == to[i].rank;
    });
    out.legs[i] = g.legs[static_cast<std::size_t>(it - from.begin())];
  }
  return out;
}

}  // namespace evorobogami
