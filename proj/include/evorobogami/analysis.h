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

#ifndef EVOROBOGAMI_ANALYSIS_H_
#define EVOROBOGAMI_ANALYSIS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evorobogami/evolution.h"
#include "evorobogami/genome.h"

namespace evorobogami {

struct ArchiveStats {
  double coverage = 0.0;
  double mean_fitness = 0.0;
  double best_fitness = 0.0;
  double qd_score = 0.0;  // sum of max(0, fitness)
  double elite_mean = 0.0;  // mean of the top ceil(10%) cells by fitness

  bool operator==(const ArchiveStats&) const = default;
};

// nullopt for an empty archive.
std::optional<ArchiveStats> archive_stats(const Archive& a);

struct ReliabilityPrecision {
  double reliability = 0.0;
  double precision = 0.0;
};

// Per-cell fitness is normalised by the best value any of `runs` holds in
// that cell (clamped to [0, 1]; cells whose best is not positive score 0).
// Reliability averages over all 400 cells, precision over the run's occupied
// cells only.
std::vector<ReliabilityPrecision> reliability_precision(
    std::span<const Archive> runs);

enum class MilestoneMode { kMean, kElite };

// Index of the initial dip: the global minimum of the first 10% of the
// series (first occurrence).
std::size_t initial_dip(std::span<const double> series);

// For each percent p, the first iteration after the initial dip whose value
// reaches p% of the final value. nullopt when never reached, or for every
// percent when the final value is not positive.
std::vector<std::optional<int>> fitness_milestones(
    std::span<const IterationStats> log, std::span<const double> percents,
    MilestoneMode mode);

// First iteration whose coverage reaches p%.
std::vector<std::optional<int>> coverage_milestones(
    std::span<const IterationStats> log, std::span<const double> percents);

struct SeedRecord {
  std::string user_id;
  std::string environment;
  int iteration = 0;
  Genome genome;
  double recorded_fitness = 0.0;
  bool duplicate = false;

  bool operator==(const SeedRecord&) const = default;
};

struct SeedPool {
  std::vector<SeedRecord> records;
};

// Drops each record whose genome equals the previous record of the same user
// and environment (by iteration order). Relative order is preserved.
SeedPool deduplicate(const SeedPool& pool);

// Greedy pick in order (fitness desc, user asc, iteration asc), taking a
// design only while its user is under `per_user_cap`. Throws ConfigError
// ("need N seeds, have M") when the pool cannot supply n designs.
std::vector<SeedRecord> select_seeds(const SeedPool& pool, int n,
                                     int per_user_cap);

struct MannWhitney {
  double u = 0.0;  // for the first sample: #(x > y) + #(x == y) / 2
  double p_two_sided = 1.0;
  bool exact = false;
};

// Two-sided Mann-Whitney U test with midranks. The p-value is exact (full
// permutation distribution, ties included) when |x| + |y| <= 20, otherwise
// from the normal approximation with tie and continuity corrections.
MannWhitney mann_whitney_u(std::span<const double> x, std::span<const double> y);

// One cell of a condition-by-condition comparison matrix: '+' when the column
// sample is larger on average, '-' when smaller, '~' when the difference is
// under 0.5% of the smaller value. `significant` marks p < 0.05.
struct Comparison {
  char sign = '~';
  bool significant = false;
  double difference = 0.0;  // mean(column) - mean(row)
  double p = 1.0;
};
Comparison compare_samples(std::span<const double> row,
                           std::span<const double> column);

}  // namespace evorobogami

#endif  // EVOROBOGAMI_ANALYSIS_H_
