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

#ifndef EVOROBOGAMI_EVOLUTION_H_
#define EVOROBOGAMI_EVOLUTION_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evorobogami/genome.h"
#include "evorobogami/rng.h"
#include "evorobogami/simulator.h"
#include "evorobogami/terrain.h"

namespace evorobogami {

inline constexpr int kMapSize = 20;
inline constexpr int kNumCells = kMapSize * kMapSize;

struct Cell {
  int row = 0;  // body length bin
  int col = 0;  // leg-length std bin

  int index() const { return row * kMapSize + col; }
  bool operator==(const Cell&) const = default;
};

struct Provenance {
  enum class Kind { kRandom, kHuman, kEvolved };
  Kind kind = Kind::kRandom;
  std::string user_id;        // human designs
  std::vector<Cell> parents;  // evolved: one parent (clone) or two (crossover)
  int iteration = 0;          // evolved: iteration that produced it

  bool operator==(const Provenance&) const = default;
};

// Compact text form, e.g. "random", "human:u3", "evolved:12:4.7+9.1".
std::string to_string(const Provenance& p);
Provenance parse_provenance(const std::string& text);

struct Individual {
  Genome genome;
  double fitness = 0.0;
  FeatureDescriptor features;
  Provenance provenance;

  bool operator==(const Individual&) const = default;
};

// Uniform 20 x 20 binning over the genome-wide feature extremes. Values on
// the upper edge fall in the last bin.
Cell bin_of(const FeatureDescriptor& f);

enum class InsertOutcome { kPlacedNew, kReplaced, kRejected };

// MAP-Elites grid: one elite per cell, the fittest ever inserted there. Ties
// keep the incumbent.
class Archive {
 public:
  InsertOutcome insert(const Individual& ind);

  const std::optional<Individual>& at(const Cell& c) const {
    return cells_[c.index()];
  }
  std::optional<Individual>& at(const Cell& c) { return cells_[c.index()]; }
  int occupied() const { return occupied_; }
  bool empty() const { return occupied_ == 0; }
  // Occupied cells in row-major order.
  std::vector<Cell> occupied_cells() const;

  bool operator==(const Archive&) const = default;

 private:
  std::array<std::optional<Individual>, kNumCells> cells_;
  int occupied_ = 0;
};

// `n` uniform draws over occupied cells, with replacement. Throws
// std::logic_error on an empty archive.
std::vector<Individual> select_parents(const Archive& a, int n, Rng& rng);

struct VariationConfig {
  double crossover_rate = 0.75;
  double mutation_rate = 0.1;
};

struct Child {
  Genome genome;
  Provenance provenance;
  bool crossed = false;
};

// Child i is crossover(parents[i], parents[i + 1 mod n]) with probability
// crossover_rate, otherwise a clone of parents[i]; then mutated.
std::vector<Child> make_batch(std::span<const Individual> parents,
                              const VariationConfig& cfg, int iteration,
                              Rng& rng);

// Maps a batch of genomes to fitness values, in order.
using Evaluator = std::function<std::vector<double>(std::span<const Genome>)>;

// Builds an evaluator that simulates every genome on `terrain`, fanning out
// over `threads` workers. Results do not depend on the worker count.
Evaluator simulation_evaluator(const Terrain& terrain, const SimConfig& cfg,
                               int threads = 1);

Individual make_individual(Genome genome, double fitness, Provenance provenance);

// Seeds (re-evaluated) followed by n_random uniform random genomes. Throws
// ConfigError when seeds.size() + n_random differs from `population`.
std::vector<Individual> init_population(std::span<const Individual> seeds,
                                        int n_random, int population,
                                        const Evaluator& evaluate, Rng& rng);

struct RunConfig {
  TerrainKind environment = TerrainKind::kGround;
  int iterations = 2000;
  int batch_size = 30;
  int initial_population = 30;
  VariationConfig variation;
  std::uint64_t rng_seed = 0;
  int n_human = 0;
  int n_random = 30;
};

struct IterationStats {
  int iteration = 0;
  double coverage = 0.0;
  double mean_fitness = 0.0;
  double best_fitness = 0.0;
  double qd_score = 0.0;
  double elite_mean = 0.0;

  bool operator==(const IterationStats&) const = default;
};

struct RunLog {
  RunConfig config;
  std::vector<IterationStats> records;  // iteration 0 is the initial population
  Archive archive;
};

// Called after each logged iteration with the cells whose elite changed.
using RunObserver = std::function<void(const IterationStats&,
                                       std::span<const Cell> changed,
                                       const Archive&)>;

// Initial population, then per iteration: select parents, vary, evaluate,
// insert in batch order, log. Deterministic in (cfg, seeds).
RunLog run(const RunConfig& cfg, std::span<const Individual> seeds,
           const Evaluator& evaluate, const RunObserver& observer = {});

}  // namespace evorobogami

#endif  // EVOROBOGAMI_EVOLUTION_H_
