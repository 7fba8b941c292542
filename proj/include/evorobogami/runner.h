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

#ifndef EVOROBOGAMI_RUNNER_H_
#define EVOROBOGAMI_RUNNER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evorobogami/analysis.h"
#include "evorobogami/evolution.h"
#include "evorobogami/rng.h"
#include "evorobogami/simulator.h"
#include "evorobogami/terrain.h"

namespace evorobogami {

// A seeding condition: how many human designs enter the initial population
// and how many of them one user may contribute.
struct Condition {
  std::string name;  // "h0", "h25", or "h<n>:<cap>" for custom ones
  int n_human = 0;
  int per_user_cap = 0;

  bool operator==(const Condition&) const = default;
};

// h0, h5, h15, h25, h30 map to (0,0), (5,1), (15,2), (25,3), (30,3).
// "h<n>:<cap>" builds a custom condition. Case-insensitive; throws
// ConfigError.
Condition parse_condition(std::string_view text);
const std::vector<Condition>& standard_conditions();

struct ExperimentPlan {
  std::vector<Terrain> environments{Terrain::ground()};
  std::vector<Condition> conditions{parse_condition("h0")};
  int repeats = 10;
  std::uint64_t base_seed = 0;
  int iterations = 2000;
  std::filesystem::path out = "runs";
  SimConfig sim;
  int jobs = 1;
};

// Seed of repeat k is base + k.
std::uint64_t repeat_seed(std::uint64_t base, int repeat);

struct RunSpec {
  Terrain terrain;
  Condition condition;
  int repeat = 0;
  std::uint64_t seed = 0;
  std::filesystem::path dir;  // <out>/<env>/<condition>/run<k>
};

std::vector<RunSpec> expand_plan(const ExperimentPlan& plan);

// Directory-safe condition label ("h12:2" becomes "h12-2").
std::string condition_dir_name(const Condition& c);

// Records from `pool` usable for `env`: matching environment (records with
// no environment match any), deduplicated, then picked by select_seeds.
std::vector<Individual> seeds_for(const SeedPool& pool, TerrainKind env,
                                  const Condition& c);

RunConfig run_config_for(const RunSpec& spec, int iterations);

// Runs one spec in memory with `threads` evaluation workers.
RunLog execute_run(const RunSpec& spec, const ExperimentPlan& plan,
                   const SeedPool& pool, int threads = 1,
                   const RunObserver& observer = {});

// Writes log.csv, archive.csv and manifest.json into spec.dir.
void write_run(const RunSpec& spec, const ExperimentPlan& plan,
               std::span<const Individual> seeds, const RunLog& log);

// Runs every spec of the plan, `plan.jobs` runs at a time, and writes them
// to disk. Seed feasibility is checked for every spec before any run starts.
// Returns the run directories in plan order.
std::vector<std::filesystem::path> run_experiment(
    const ExperimentPlan& plan, const SeedPool& pool,
    const std::function<void(const RunSpec&)>& on_done = {});

// Worker cap from EVOROBOGAMI_THREADS, else the hardware concurrency (>= 1).
int worker_cap();

// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

struct LoadedRun {
  std::filesystem::path dir;
  std::string environment;
  std::string condition;
  int repeat = 0;
  std::uint64_t seed = 0;
  std::vector<IterationStats> log;
  Archive archive;
  std::vector<std::string> problems;  // manifest hash mismatches and the like
};

LoadedRun load_run(const std::filesystem::path& dir);

// Every directory below `root` holding a manifest.json, sorted by path.
std::vector<LoadedRun> load_runs(const std::filesystem::path& root);

enum class SeedMode { kClusteredHigh, kClusteredLow, kScattered };
SeedMode parse_seed_mode(std::string_view text);
std::string_view to_string(SeedMode mode);

inline constexpr int kHillClimbBudget = 200;

// Synthetic stand-in for a pool of human designs:
//   clustered_high: n independent hill-climbs from the neutral design,
//     kHillClimbBudget evaluations each, keeping each climb's best;
//   clustered_low: random designs rejection-sampled into the low body length,
//     low leg-spread quadrant of the feature map, unoptimised;
//   scattered: uniform random designs.
// Users are u1..uK with K = ceil(n / 3), assigned round-robin; the
// iteration field counts each user's designs from 0.
SeedPool generate_synthetic_seeds(const Terrain& env, SeedMode mode, int n,
                                  Rng& rng, const SimConfig& sim = {},
                                  int threads = 1);

inline const std::vector<double> kMilestonePercents{30, 40, 50, 60, 70, 80, 90};

// Milestone tables: one row per (environment, progress percent). A column per
// condition holds the mean over the repeats that reached the milestone (empty
// when none did); a matching "<condition>_reached" column counts them as n/N.
std::string fitness_milestone_csv(std::span<const LoadedRun> runs,
                                  MilestoneMode mode);
std::string coverage_milestone_csv(std::span<const LoadedRun> runs);

// Condition-by-condition comparison matrices of final-archive metrics
// (qd_score, global_performance, reliability, precision, coverage,
// mean_fitness) and of the iterations needed for 50% and 90% coverage.
// Each cell is the sign, suffixed with '*' when p < 0.05.
std::string pairwise_csv(std::span<const LoadedRun> runs);

}  // namespace evorobogami

#endif  // EVOROBOGAMI_RUNNER_H_
