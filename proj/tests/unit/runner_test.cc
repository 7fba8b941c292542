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
#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include "builders.h"
#include "evorobogami/error.h"
#include "evorobogami/io.h"
#include "evorobogami/runner.h"
#include "evorobogami/simulator.h"

namespace evorobogami {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(fs::temp_directory_path() / ("evorobogami_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

TEST(Conditions, StandardSet) {
  const auto& s = standard_conditions();
  ASSERT_EQ(s.size(), 5u);
  EXPECT_EQ(s[0], (Condition{"h0", 0, 0}));
  EXPECT_EQ(s[1], (Condition{"h5", 5, 1}));
  EXPECT_EQ(s[2], (Condition{"h15", 15, 2}));
  EXPECT_EQ(s[3], (Condition{"h25", 25, 3}));
  EXPECT_EQ(s[4], (Condition{"h30", 30, 3}));
  EXPECT_EQ(parse_condition("H25"), s[3]);
  EXPECT_EQ(parse_condition("h12:2"), (Condition{"h12:2", 12, 2}));
  EXPECT_EQ(condition_dir_name(parse_condition("h12:2")), "h12-2");
  EXPECT_THROW(parse_condition("x5"), ConfigError);
  EXPECT_THROW(parse_condition("h31"), ConfigError);
}

TEST(Plan, FullMatrixHas150Runs) {
  ExperimentPlan plan;
  plan.environments = {Terrain::ground(), Terrain::sine(), Terrain::valley()};
  plan.conditions = standard_conditions();
  plan.base_seed = 100;
  plan.out = "out";
  const auto specs = expand_plan(plan);
  EXPECT_EQ(specs.size(), 150u);
  std::set<fs::path> dirs;
  for (const auto& s : specs) {
    dirs.insert(s.dir);
    EXPECT_EQ(s.seed, repeat_seed(100, s.repeat));
  }
  EXPECT_EQ(dirs.size(), 150u);
  EXPECT_EQ(specs.front().dir, fs::path("out") / "ground" / "h0" / "run0");
  EXPECT_EQ(repeat_seed(7, 3), 10u);
}

SeedPool pool_of(int n, const std::string& env = "ground") {
  SeedPool pool;
  for (int i = 0; i < n; ++i) {
    SeedRecord r;
    r.user_id = "u" + std::to_string(i % 10);
    r.environment = env;
    r.iteration = i / 10;
    r.genome = testing::genome_for_cell({i % 20, (3 * i) % 20});
    r.recorded_fitness = i;
    pool.records.push_back(r);
  }
  return pool;
}

TEST(Seeds, FilteredByEnvironment) {
  SeedPool pool = pool_of(10, "ground");
  for (auto& r : pool_of(10, "sine").records) pool.records.push_back(r);
  SeedRecord any = pool.records.front();
  any.environment = "";
  any.user_id = "anyone";
  any.recorded_fitness = 100;
  pool.records.push_back(any);
  const auto seeds = seeds_for(pool, TerrainKind::kSine, parse_condition("h5"));
  ASSERT_EQ(seeds.size(), 5u);
  EXPECT_EQ(seeds[0].provenance.user_id, "anyone");
  for (const auto& s : seeds) EXPECT_EQ(s.provenance.kind, Provenance::Kind::kHuman);
}

TEST(Experiment, ShortPoolFailsBeforeRunning) {
  TempDir tmp("short_pool");
  ExperimentPlan plan;
  plan.conditions = {parse_condition("h0"), parse_condition("h25:25")};
  plan.repeats = 1;
  plan.iterations = 1;
  plan.out = tmp.path() / "runs";
  try {
    run_experiment(plan, pool_of(20));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("need 25 seeds, have 20"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(plan.out / "ground" / "h0" / "run0" / "log.csv"));
}

TEST(Experiment, RerunIsByteIdenticalAndTamperingIsDetected) {
  TempDir tmp("rerun");
  ExperimentPlan plan;
  plan.conditions = {parse_condition("h0"), parse_condition("h5")};
  plan.repeats = 2;
  plan.iterations = 2;
  plan.base_seed = 1;
  plan.jobs = 2;
  const SeedPool pool = pool_of(20);
  plan.out = tmp.path() / "a";
  const auto dirs_a = run_experiment(plan, pool);
  plan.out = tmp.path() / "b";
  plan.jobs = 1;
  const auto dirs_b = run_experiment(plan, pool);
  ASSERT_EQ(dirs_a.size(), 4u);
  for (std::size_t i = 0; i < dirs_a.size(); ++i) {
    for (const char* f : {"log.csv", "archive.csv"}) {
      EXPECT_EQ(io::read_text(dirs_a[i] / f), io::read_text(dirs_b[i] / f));
    }
    const auto manifest = io::read_json(dirs_a[i] / "manifest.json");
    EXPECT_TRUE(manifest.contains("config_hash"));
    EXPECT_TRUE(manifest.contains("seeds"));
  }

  auto runs = load_runs(tmp.path() / "a");
  ASSERT_EQ(runs.size(), 4u);
  for (const auto& r : runs) {
    EXPECT_TRUE(r.problems.empty());
    EXPECT_EQ(r.log.size(), 3u);
  }
  io::write_text(dirs_a[0] / "log.csv", io::read_text(dirs_a[0] / "log.csv") + "\n");
  fs::remove(dirs_a[1] / "archive.csv");
  auto manifest = io::read_json(dirs_a[2] / "manifest.json");
  manifest["config"]["run"]["iterations"] = 999;
  io::write_text(dirs_a[2] / "manifest.json", manifest.dump(2));
  runs = load_runs(tmp.path() / "a");
  auto has = [](const LoadedRun& r, const std::string& p) {
    return std::find(r.problems.begin(), r.problems.end(), p) != r.problems.end();
  };
  EXPECT_TRUE(has(runs[0], "log.csv hash mismatch"));
  EXPECT_TRUE(has(runs[1], "archive.csv missing"));
  EXPECT_TRUE(has(runs[2], "config hash mismatch"));
  EXPECT_TRUE(runs[3].problems.empty());
}

TEST(Hash, Fnv1aVectors) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(SyntheticSeeds, ScatteredSpreadsAcrossCells) {
  Rng rng(71);
  const SeedPool pool = generate_synthetic_seeds(Terrain::ground(), SeedMode::kScattered, 30, rng);
  ASSERT_EQ(pool.records.size(), 30u);
  std::set<int> cells;
  std::set<std::string> users;
  for (const auto& r : pool.records) {
    EXPECT_TRUE(validate(r.genome).empty());
    cells.insert(bin_of(features(r.genome)).index());
    users.insert(r.user_id);
    EXPECT_EQ(r.environment, "ground");
  }
  EXPECT_GE(cells.size(), 15u);
  EXPECT_EQ(users.size(), 10u);
  EXPECT_EQ(deduplicate(pool).records.size(), 30u);
}

TEST(SyntheticSeeds, ClusteredLowStaysInQuadrant) {
  Rng rng(72);
  const SeedPool pool = generate_synthetic_seeds(Terrain::ground(), SeedMode::kClusteredLow, 12, rng);
  ASSERT_EQ(pool.records.size(), 12u);
  for (const auto& r : pool.records) {
    const Cell c = bin_of(features(r.genome));
    EXPECT_LT(c.row, 10);
    EXPECT_LT(c.col, 10);
  }
  EXPECT_EQ(pool.records[0].user_id, "u1");
  EXPECT_EQ(pool.records[4].user_id, "u1");
  EXPECT_EQ(pool.records[4].iteration, 1);
}

TEST(SyntheticSeeds, ClusteredHighBeatsRandomBaseline) {
  Rng base(73);
  std::vector<double> baseline;
  for (int i = 0; i < 500; ++i) baseline.push_back(simulate(random_genome(base), Terrain::ground()).fitness);
  std::sort(baseline.begin(), baseline.end());
  const double p90 = baseline[449];
  Rng rng(74);
  const SeedPool pool =
      generate_synthetic_seeds(Terrain::ground(), SeedMode::kClusteredHigh, 25, rng, {}, worker_cap());
  ASSERT_EQ(pool.records.size(), 25u);
  for (const auto& r : pool.records) {
    EXPECT_GE(r.recorded_fitness, p90);
    EXPECT_EQ(r.recorded_fitness, simulate(r.genome, Terrain::ground()).fitness);
  }
}

TEST(SeedModes, Parse) {
  EXPECT_EQ(parse_seed_mode("clustered_high"), SeedMode::kClusteredHigh);
  EXPECT_EQ(to_string(SeedMode::kScattered), "scattered");
  EXPECT_THROW(parse_seed_mode("dense"), ConfigError);
}

LoadedRun fake_run(const std::string& condition, int repeat, int cross50) {
  LoadedRun r;
  r.environment = "ground";
  r.condition = condition;
  r.repeat = repeat;
  for (int i = 0; i <= 100; ++i) {
    IterationStats s;
    s.iteration = i;
    s.coverage = std::min(1.0, 0.5 * i / cross50);
    s.mean_fitness = 1.0 + i;
    s.best_fitness = 2.0 + i;
    s.qd_score = s.coverage * 400;
    s.elite_mean = s.best_fitness;
    r.log.push_back(s);
  }
  r.archive.insert(make_individual(testing::genome_for_cell({repeat, 0}), 1.0 + repeat, {}));
  return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

TEST(Tables, CoverageMilestoneMeansMatchPerRunValues) {
  std::vector<LoadedRun> runs{fake_run("h0", 0, 10), fake_run("h0", 1, 20), fake_run("h5", 0, 80)};
  const auto rows = csv_rows(coverage_milestone_csv(runs));
  ASSERT_EQ(rows[0], (std::vector<std::string>{"environment", "progress", "h0", "h5", "h0_reached", "h5_reached"}));
  // 50% row: h0 runs reach it at 10 and 20, h5 at 80.
  const auto& fifty = rows[3];
  EXPECT_EQ(fifty[1], "50");
  EXPECT_EQ(fifty[2], "15");
  EXPECT_EQ(fifty[3], "80");
  EXPECT_EQ(fifty[4], "2/2");
  EXPECT_EQ(fifty[5], "1/1");
  // 90% row: the h5 run stops at 62.5% coverage.
  EXPECT_EQ(rows[7][3], "");
  EXPECT_EQ(rows[7][5], "0/1");
}

TEST(Tables, PairwiseMatrixLayout) {
  std::vector<LoadedRun> runs;
  for (int k = 0; k < 5; ++k) runs.push_back(fake_run("h0", k, 10 + k));
  for (int k = 0; k < 5; ++k) runs.push_back(fake_run("h30", k, 50 + k));
  const auto rows = csv_rows(pairwise_csv(runs));
  ASSERT_EQ(rows[0], (std::vector<std::string>{"environment", "metric", "condition", "h0", "h30"}));
  ASSERT_EQ(rows.size(), 1u + 8 * 2);
  for (const auto& r : rows) {
    if (r[1] == "iters_to_50_coverage" && r[2] == "h0") {
      EXPECT_EQ(r[3], "~");
      EXPECT_EQ(r[4], "+*");
    }
    if (r[1] == "iters_to_50_coverage" && r[2] == "h30") {
      EXPECT_EQ(r[3], "-*");
    }
  }
}

}  // namespace
}  // namespace evorobogami
