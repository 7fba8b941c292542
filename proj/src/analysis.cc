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

#include "evorobogami/analysis.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <tuple>
#include <utility>

#include "evorobogami/error.h"

namespace evorobogami {

namespace {

constexpr std::size_t kExactLimit = 20;

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Doubled midranks of the pooled sample (integers, so ties stay exact).
std::vector<std::int64_t> doubled_midranks(std::span<const double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<std::int64_t> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // Ranks i+1 .. j+1 share the midrank (i + j + 2) / 2.
    const auto doubled = static_cast<std::int64_t>(i + j + 2);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::optional<ArchiveStats> archive_stats(const Archive& a) {
  if (a.empty()) return std::nullopt;
  std::vector<double> fitness;
  fitness.reserve(a.occupied());
  for (const auto& c : a.occupied_cells()) fitness.push_back(a.at(c)->fitness);

  ArchiveStats s;
  const double occupied = static_cast<double>(fitness.size());
  s.coverage = occupied / kNumCells;
  s.mean_fitness = mean_of(fitness);
  s.best_fitness = *std::max_element(fitness.begin(), fitness.end());
  for (double f : fitness) s.qd_score += std::max(0.0, f);

  std::sort(fitness.begin(), fitness.end(), std::greater<>());
  const std::size_t top = (fitness.size() + 9) / 10;
  s.elite_mean = mean_of(std::span<const double>(fitness.data(), top));
  return s;
}

std::vector<ReliabilityPrecision> reliability_precision(
    std::span<const Archive> runs) {
  std::array<double, kNumCells> best;
  std::array<bool, kNumCells> seen{};
  for (const auto& run : runs) {
    for (const auto& c : run.occupied_cells()) {
      const double f = run.at(c)->fitness;
      const int i = c.index();
      if (!seen[i] || f > best[i]) best[i] = f;
      seen[i] = true;
    }
  }

  std::vector<ReliabilityPrecision> out;
  out.reserve(runs.size());
  for (const auto& run : runs) {
    double total = 0.0;
    for (const auto& c : run.occupied_cells()) {
      const double b = best[c.index()];
      if (b > 0.0) total += std::clamp(run.at(c)->fitness / b, 0.0, 1.0);
    }
    ReliabilityPrecision rp;
    rp.reliability = total / kNumCells;
    rp.precision = run.empty() ? 0.0 : total / run.occupied();
    out.push_back(rp);
  }
  return out;
}

std::size_t initial_dip(std::span<const double> series) {
  if (series.empty()) return 0;
  const std::size_t window = (series.size() - 1) / 10;
  std::size_t dip = 0;
  for (std::size_t i = 1; i <= window; ++i) {
    if (series[i] < series[dip]) dip = i;
  }
  return dip;
}

std::vector<std::optional<int>> fitness_milestones(
    std::span<const IterationStats> log, std::span<const double> percents,
    MilestoneMode mode) {
  std::vector<std::optional<int>> out(percents.size());
  if (log.empty()) return out;
  std::vector<double> series;
  series.reserve(log.size());
  for (const auto& r : log) {
    series.push_back(mode == MilestoneMode::kMean ? r.mean_fitness : r.elite_mean);
  }
  const double final_value = series.back();
  if (!(final_value > 0.0)) return out;
  const std::size_t dip = initial_dip(series);
  for (std::size_t k = 0; k < percents.size(); ++k) {
    const double threshold = percents[k] / 100.0 * final_value;
    for (std::size_t i = dip + 1; i < series.size(); ++i) {
      if (series[i] >= threshold) {
        out[k] = log[i].iteration;
        break;
      }
    }
  }
  return out;
}

std::vector<std::optional<int>> coverage_milestones(
    std::span<const IterationStats> log, std::span<const double> percents) {
  std::vector<std::optional<int>> out(percents.size());
  for (std::size_t k = 0; k < percents.size(); ++k) {
    const double threshold = percents[k] / 100.0;
    for (const auto& r : log) {
      if (r.coverage >= threshold) {
        out[k] = r.iteration;
        break;
      }
    }
  }
  return out;
}

SeedPool deduplicate(const SeedPool& pool) {
  const auto& recs = pool.records;
  std::vector<std::size_t> order(recs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = recs[a];
    const auto& rb = recs[b];
    return std::tie(ra.user_id, ra.environment, ra.iteration) <
           std::tie(rb.user_id, rb.environment, rb.iteration);
  });
  std::vector<bool> keep(recs.size(), true);
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& prev = recs[order[k - 1]];
    const auto& cur = recs[order[k]];
    if (prev.user_id == cur.user_id && prev.environment == cur.environment &&
        prev.genome == cur.genome) {
      keep[order[k]] = false;
    }
  }
  SeedPool out;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (keep[i]) {
      out.records.push_back(recs[i]);
      out.records.back().duplicate = false;
    }
  }
  return out;
}

std::vector<SeedRecord> select_seeds(const SeedPool& pool, int n,
                                     int per_user_cap) {
  std::vector<const SeedRecord*> sorted;
  sorted.reserve(pool.records.size());
  for (const auto& r : pool.records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SeedRecord* a, const SeedRecord* b) {
                     if (a->recorded_fitness != b->recorded_fitness) {
                       return a->recorded_fitness > b->recorded_fitness;
                     }
                     if (a->user_id != b->user_id) return a->user_id < b->user_id;
                     return a->iteration < b->iteration;
                   });

  std::map<std::string, int> taken;
  std::vector<SeedRecord> out;
  for (const SeedRecord* r : sorted) {
    if (static_cast<int>(out.size()) == n) break;
    int& count = taken[r->user_id];
    if (count >= per_user_cap) continue;
    ++count;
    out.push_back(*r);
  }
  if (static_cast<int>(out.size()) < n) {
    throw ConfigError("need " + std::to_string(n) + " seeds, have " +
                      std::to_string(out.size()));
  }
  return out;
}

MannWhitney mann_whitney_u(std::span<const double> x, std::span<const double> y) {
  const std::size_t n1 = x.size();
  const std::size_t n2 = y.size();
  const std::size_t n = n1 + n2;
  MannWhitney out;
  if (n1 == 0 || n2 == 0) return out;

  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const auto ranks = doubled_midranks(pooled);
  std::int64_t rank_sum2 = 0;
  for (std::size_t i = 0; i < n1; ++i) rank_sum2 += ranks[i];
  const auto n1i = static_cast<std::int64_t>(n1);
  const auto ni = static_cast<std::int64_t>(n);
  out.u = static_cast<double>(rank_sum2 - n1i * (n1i + 1)) / 2.0;

  if (n <= kExactLimit) {
    // Distribution of the doubled rank sum over all C(n, n1) labelings.
    const std::int64_t max_sum = n * (n + 1);
    std::vector<std::vector<double>> ways(
        n1 + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t item = 0; item < n; ++item) {
      const auto r = static_cast<std::size_t>(ranks[item]);
      for (std::size_t k = std::min(item + 1, n1); k >= 1; --k) {
        for (std::size_t s = max_sum; s >= r; --s) ways[k][s] += ways[k - 1][s - r];
      }
    }
    const std::int64_t centre = n1i * (ni + 1);
    const std::int64_t observed = std::llabs(rank_sum2 - centre);
    double extreme = 0.0;
    double total = 0.0;
    for (std::int64_t s = 0; s <= max_sum; ++s) {
      const double w = ways[n1][static_cast<std::size_t>(s)];
      total += w;
      if (std::llabs(s - centre) >= observed) extreme += w;
    }
    out.p_two_sided = std::min(1.0, extreme / total);
    out.exact = true;
    return out;
  }

  std::map<std::int64_t, std::int64_t> ties;
  for (auto r : ranks) ++ties[r];
  double tie_term = 0.0;
  for (const auto& [rank, t] : ties) {
    const auto td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const double nn = static_cast<double>(n);
  const double prod = static_cast<double>(n1) * static_cast<double>(n2);
  const double variance = prod / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  if (variance <= 0.0) {
    out.p_two_sided = 1.0;
    return out;
  }
  const double z = std::max(0.0, std::abs(out.u - prod / 2.0) - 0.5) / std::sqrt(variance);
  out.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return out;
}

Comparison compare_samples(std::span<const double> row,
                           std::span<const double> column) {
  Comparison c;
  const double mr = mean_of(row);
  const double mc = mean_of(column);
  c.difference = mc - mr;
  const double smaller = std::min(std::abs(mr), std::abs(mc));
  if (std::abs(c.difference) < 0.005 * smaller || c.difference == 0.0) {
    c.sign = '~';
  } else {
    c.sign = c.difference > 0.0 ? '+' : '-';
  }
  c.p = mann_whitney_u(row, column).p_two_sided;
  c.significant = c.p < 0.05;
  return c;
}

}  // namespace evorobogami
