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

#include <algorithm>
#include <map>
#include <stdexcept>

#include "builders.h"
#include "evorobogami/analysis.h"
#include "evorobogami/error.h"
#include "evorobogami/evolution.h"
#include "evorobogami/rng.h"

namespace evorobogami {
namespace {

Individual at_cell(const Cell& c, double fitness) {
  return make_individual(testing::genome_for_cell(c), fitness, {});
}

// Cheap deterministic stand-in for the simulator.
std::vector<double> toy_fitness(std::span<const Genome> genomes) {
  std::vector<double> out;
  for (const auto& g : genomes) {
    const FeatureDescriptor f = features(g);
    out.push_back(f.body_length_x - 0.3 * f.leg_length_std + g.body_scale[1]);
  }
  return out;
}

TEST(Binning, Corners) {
  EXPECT_EQ(bin_of({3.5, 0.0}), (Cell{0, 0}));
  EXPECT_EQ(bin_of({30.0, 21.5}), (Cell{19, 19}));
  EXPECT_EQ(bin_of({16.75, 10.75}), (Cell{10, 10}));
}

TEST(Binning, BuilderHitsRequestedCell) {
  for (int r = 0; r < kMapSize; ++r) {
    for (int c = 0; c < kMapSize; ++c) {
      const Genome g = testing::genome_for_cell({r, c});
      ASSERT_TRUE(validate(g).empty());
      EXPECT_EQ(bin_of(features(g)), (Cell{r, c}));
    }
  }
}

TEST(Archive, InsertionOutcomes) {
  Archive a;
  EXPECT_EQ(a.insert(at_cell({3, 4}, 7.0)), InsertOutcome::kPlacedNew);
  EXPECT_EQ(a.insert(at_cell({3, 4}, 5.0)), InsertOutcome::kRejected);
  Individual tie = at_cell({3, 4}, 7.0);
  tie.provenance.kind = Provenance::Kind::kHuman;
  EXPECT_EQ(a.insert(tie), InsertOutcome::kRejected);
  EXPECT_EQ(a.at({3, 4})->provenance.kind, Provenance::Kind::kRandom);
  EXPECT_EQ(a.insert(at_cell({3, 4}, 9.0)), InsertOutcome::kReplaced);
  EXPECT_EQ(a.at({3, 4})->fitness, 9.0);
  EXPECT_EQ(a.occupied(), 1);
}

TEST(Archive, MatchesPerCellMaxReplay) {
  Rng rng(41);
  Archive a;
  std::map<int, double> best;
  for (int i = 0; i < 500; ++i) {
    const Cell c{rng.uniform_int(0, 5), rng.uniform_int(0, 5)};
    const double f = rng.uniform(-10, 10);
    a.insert(at_cell(c, f));
    auto it = best.find(c.index());
    if (it == best.end() || f > it->second) best[c.index()] = f;
  }
  EXPECT_EQ(a.occupied(), static_cast<int>(best.size()));
  for (const auto& [index, f] : best) {
    const Cell c{index / kMapSize, index % kMapSize};
    ASSERT_TRUE(a.at(c).has_value());
    EXPECT_EQ(a.at(c)->fitness, f);
    EXPECT_EQ(bin_of(a.at(c)->features), c);
  }
}

TEST(Parents, EmptyArchiveThrows) {
  Rng rng(1);
  EXPECT_THROW(select_parents(Archive{}, 30, rng), std::logic_error);
}

TEST(Parents, SingleCellGivesIdenticalParents) {
  Archive a;
  a.insert(at_cell({1, 1}, 1.0));
  Rng rng(2);
  const auto p = select_parents(a, 30, rng);
  ASSERT_EQ(p.size(), 30u);
  for (const auto& ind : p) EXPECT_EQ(ind, *a.at({1, 1}));
}

TEST(Parents, UniformOverOccupiedCells) {
  Archive a;
  for (int r = 0; r < kMapSize; ++r) {
    for (int c = 0; c < kMapSize; ++c) a.insert(at_cell({r, c}, r + c));
  }
  Rng rng(3);
  std::map<int, int> counts;
  // 2500 expected per cell, so the 10% band is five standard deviations wide.
  const int draws = 1000000;
  for (int chunk = 0; chunk < 10; ++chunk) {
    for (const auto& p : select_parents(a, draws / 10, rng)) ++counts[bin_of(p.features).index()];
  }
  ASSERT_EQ(counts.size(), 400u);
  for (const auto& [cell, n] : counts) {
    EXPECT_NEAR(n, draws / 400.0, 0.1 * draws / 400.0) << cell;
  }
  Rng r1(5), r2(5);
  EXPECT_EQ(select_parents(a, 30, r1), select_parents(a, 30, r2));
}

TEST(Batch, DegenerateRatesGiveClones) {
  Rng rng(4);
  std::vector<Individual> parents;
  for (int i = 0; i < 30; ++i) parents.push_back(make_individual(random_genome(rng), 0, {}));
  const auto kids = make_batch(parents, {0.0, 0.0}, 1, rng);
  ASSERT_EQ(kids.size(), 30u);
  for (int i = 0; i < 30; ++i) {
    EXPECT_EQ(kids[i].genome, parents[i].genome);
    EXPECT_FALSE(kids[i].crossed);
    EXPECT_EQ(kids[i].provenance.kind, Provenance::Kind::kEvolved);
    EXPECT_EQ(kids[i].provenance.iteration, 1);
  }
}

TEST(Batch, CrossoverFrequencyAndDeterminism) {
  Rng rng(6);
  std::vector<Individual> parents;
  for (int i = 0; i < 30; ++i) parents.push_back(make_individual(random_genome(rng), 0, {}));
  long crossed = 0, total = 0;
  for (int b = 0; b < 10000; ++b) {
    for (const auto& k : make_batch(parents, {}, 1, rng)) {
      crossed += k.crossed;
      ++total;
      ASSERT_TRUE(validate(k.genome).empty());
    }
  }
  EXPECT_NEAR(crossed / static_cast<double>(total), 0.75, 0.01);
  Rng r1(7), r2(7);
  const auto a = make_batch(parents, {}, 2, r1);
  const auto b = make_batch(parents, {}, 2, r2);
  for (int i = 0; i < 30; ++i) EXPECT_EQ(a[i].genome, b[i].genome);
}

TEST(InitPopulation, SizesAndOrder) {
  Rng rng(8);
  const Evaluator eval = toy_fitness;
  EXPECT_EQ(init_population({}, 30, 30, eval, rng).size(), 30u);
  std::vector<Individual> seeds;
  for (int i = 0; i < 30; ++i) {
    Provenance p;
    p.kind = Provenance::Kind::kHuman;
    p.user_id = "u" + std::to_string(i % 4);
    seeds.push_back(make_individual(testing::genome_for_cell({i % 20, 3}), -999.0, p));
  }
  const auto pop = init_population(seeds, 0, 30, eval, rng);
  ASSERT_EQ(pop.size(), 30u);
  for (int i = 0; i < 30; ++i) {
    EXPECT_EQ(pop[i].genome, seeds[i].genome);
    EXPECT_EQ(pop[i].provenance, seeds[i].provenance);
    EXPECT_NE(pop[i].fitness, -999.0);  // re-evaluated
  }
  EXPECT_THROW(init_population(seeds, 5, 30, eval, rng), ConfigError);
}

TEST(InitPopulation, SeedsInOneCell) {
  Rng rng(9);
  std::vector<Individual> seeds(25, at_cell({0, 0}, 0.0));
  RunConfig cfg;
  cfg.iterations = 0;
  cfg.n_human = 25;
  cfg.n_random = 5;
  const RunLog log = run(cfg, seeds, toy_fitness);
  const int covered = log.archive.occupied();
  EXPECT_GE(covered, 1);
  EXPECT_LE(covered, 6);
  EXPECT_TRUE(log.archive.at({0, 0}).has_value());
}

TEST(Run, ZeroIterationsLogsInitialisationOnly) {
  RunConfig cfg;
  cfg.iterations = 0;
  const RunLog log = run(cfg, {}, toy_fitness);
  ASSERT_EQ(log.records.size(), 1u);
  EXPECT_EQ(log.records[0].iteration, 0);
}

TEST(Run, DeterministicAndMonotone) {
  RunConfig cfg;
  cfg.iterations = 60;
  cfg.rng_seed = 17;
  const RunLog a = run(cfg, {}, toy_fitness);
  const RunLog b = run(cfg, {}, toy_fitness);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.archive, b.archive);
  ASSERT_EQ(a.records.size(), 61u);
  for (std::size_t i = 1; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].iteration, static_cast<int>(i));
    EXPECT_GE(a.records[i].coverage, a.records[i - 1].coverage);
    EXPECT_GE(a.records[i].qd_score, a.records[i - 1].qd_score);
    EXPECT_GE(a.records[i].best_fitness, a.records[i - 1].best_fitness);
  }
  const auto stats = archive_stats(a.archive);
  ASSERT_TRUE(stats.has_value());
  EXPECT_EQ(stats->coverage, a.records.back().coverage);
  EXPECT_EQ(stats->qd_score, a.records.back().qd_score);
}

TEST(Run, PerCellFitnessNeverDrops) {
  RunConfig cfg;
  cfg.iterations = 40;
  cfg.rng_seed = 3;
  std::array<double, kNumCells> last;
  last.fill(-1e300);
  run(cfg, {}, toy_fitness, [&](const IterationStats&, std::span<const Cell>, const Archive& a) {
    for (const Cell& c : a.occupied_cells()) {
      ASSERT_GE(a.at(c)->fitness, last[c.index()]);
      last[c.index()] = a.at(c)->fitness;
    }
  });
}

TEST(Run, BestAtInitCoversBestSeed) {
  std::vector<Individual> seeds;
  for (int i = 0; i < 25; ++i) seeds.push_back(at_cell({i % 20, i % 7}, 0.0));
  RunConfig cfg;
  cfg.iterations = 0;
  cfg.n_human = 25;
  cfg.n_random = 5;
  const RunLog log = run(cfg, seeds, toy_fitness);
  std::vector<Genome> genomes;
  for (const auto& s : seeds) genomes.push_back(s.genome);
  const auto f = toy_fitness(genomes);
  EXPECT_GE(log.records[0].best_fitness, *std::max_element(f.begin(), f.end()));
}

TEST(Run, SeedCountMustMatchCondition) {
  RunConfig cfg;
  cfg.n_human = 5;
  cfg.n_random = 25;
  EXPECT_THROW(run(cfg, {}, toy_fitness), ConfigError);
}

TEST(Run, SimulationResultsIgnoreWorkerCount) {
  RunConfig cfg;
  cfg.iterations = 2;
  cfg.rng_seed = 5;
  const RunLog a = run(cfg, {}, simulation_evaluator(Terrain::ground(), {}, 1));
  const RunLog b = run(cfg, {}, simulation_evaluator(Terrain::ground(), {}, 3));
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.archive, b.archive);
}

TEST(Provenance, TextRoundTrip) {
  Provenance h;
  h.kind = Provenance::Kind::kHuman;
  h.user_id = "u3";
  Provenance e;
  e.kind = Provenance::Kind::kEvolved;
  e.iteration = 12;
  e.parents = {{4, 7}, {9, 1}};
  for (const Provenance& p : {Provenance{}, h, e}) EXPECT_EQ(parse_provenance(to_string(p)), p);
  EXPECT_EQ(to_string(h), "human:u3");
  EXPECT_THROW(parse_provenance("alien"), ConfigError);
}

}  // namespace
}  // namespace evorobogami
