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

// Acceptance suite. Each criterion prints one PASS/FAIL line; the exit code
// is non-zero when any selected criterion fails.
//
//   acceptance [--only NAME]... [--list] [--work DIR]

#include <sys/wait.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "builders.h"
#include "evorobogami/analysis.h"
#include "evorobogami/evolution.h"
#include "evorobogami/genome.h"
#include "evorobogami/io.h"
#include "evorobogami/rng.h"
#include "evorobogami/runner.h"
#include "evorobogami/simulator.h"

namespace fs = std::filesystem;
using namespace evorobogami;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path g_work = fs::temp_directory_path() / "evorobogami_acceptance";

// Runs the command-line tool; returns its exit status.
int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + EVOROBOGAMI_CLI + "\" " + args;
  const int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << v;
  return ss.str();
}

template <typename T>
double median(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? static_cast<double>(v[n / 2])
               : (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2])) / 2.0;
}

std::string join(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + fmt(v[i]);
  return out + "]";
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = g_work / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<LoadedRun> runs_of(const fs::path& root, const std::string& condition) {
  std::vector<LoadedRun> out;
  for (auto& r : load_runs(root)) {
    if (r.condition == condition) out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(),
            [](const LoadedRun& a, const LoadedRun& b) { return a.repeat < b.repeat; });
  return out;
}

// ---------------------------------------------------------------------------

Outcome determinism() {
  const fs::path root = fresh_dir("determinism");
  const std::string cmd = "run --env ground --condition h0 --iterations 50 --rng-seed 7";
  const auto t0 = std::chrono::steady_clock::now();
  const int rc1 = cli(cmd + " --out \"" + (root / "a").string() + "\" 2>/dev/null");
  const int rc2 = cli(cmd + " --out \"" + (root / "b").string() + "\" 2>/dev/null");
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (rc1 != 0 || rc2 != 0) return {false, "run exited with " + std::to_string(rc1) + "/" + std::to_string(rc2)};
  int files = 0;
  int differing = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    const auto name = e.path().filename().string();
    if (name != "log.csv" && name != "archive.csv") continue;
    const fs::path other = root / "b" / fs::relative(e.path(), root / "a");
    ++files;
    if (!fs::exists(other) || io::read_text(e.path()) != io::read_text(other)) ++differing;
  }
  const bool pass = files == 20 && differing == 0 && secs < 120.0;
  return {pass, std::to_string(files) + " files compared, " + std::to_string(differing) +
                    " differ, two executions took " + fmt(secs, 3) + " s (limit 120 s)"};
}

Outcome archive_oracle() {
  Rng rng(2024);
  Archive archive;
  struct Entry {
    Individual ind;
    int order;
  };
  std::vector<Entry> inserted;
  for (int i = 0; i < 500; ++i) {
    // Coarse fitness values force plenty of ties.
    const double f = std::round(rng.uniform(-20.0, 60.0) / 5.0) * 5.0;
    Individual ind = make_individual(random_genome(rng), f, {});
    archive.insert(ind);
    inserted.push_back({std::move(ind), i});
  }
  // Brute force: per cell, the strictly greatest fitness, first arrival on ties.
  int mismatches = 0;
  int occupied = 0;
  for (int r = 0; r < kMapSize; ++r) {
    for (int c = 0; c < kMapSize; ++c) {
      const Individual* best = nullptr;
      for (const auto& e : inserted) {
        const Cell cell = bin_of(features(e.ind.genome));
        if (cell.row != r || cell.col != c) continue;
        if (!best || e.ind.fitness > best->fitness) best = &e.ind;
      }
      const auto& got = archive.at(Cell{r, c});
      if (best) ++occupied;
      if (static_cast<bool>(best) != got.has_value() || (best && !(*best == *got))) ++mismatches;
    }
  }
  const bool pass = mismatches == 0 && occupied == archive.occupied();
  return {pass, "500 insertions, " + std::to_string(occupied) + " cells, " +
                    std::to_string(mismatches) + " mismatching cells"};
}

Outcome fitness_formula() {
  struct Case {
    double dx, dy, want;
  };
  const Case cases[] = {{10, 4, 8.0}, {0, 0, 0.0}, {-3, 2, -4.0}};
  std::string detail;
  bool pass = true;
  for (const auto& c : cases) {
    const double got = fitness(c.dx, c.dy);
    pass = pass && got == c.want;
    detail += "f(" + fmt(c.dx) + "," + fmt(c.dy) + ")=" + fmt(got, 17) + " ";
  }
  return {pass, detail + "(exact)"};
}

Outcome coverage_dynamics() {
  const fs::path root = fresh_dir("coverage_dynamics");
  if (cli("run --env ground --condition h0 --repeats 5 --iterations 2000 --rng-seed 100 --out \"" +
          root.string() + "\" 2>/dev/null") != 0) {
    return {false, "run failed"};
  }
  std::vector<double> ratios;
  for (const auto& r : runs_of(root, "h0")) {
    if (r.log.size() != 2001) return {false, "unexpected log length"};
    // Cells are never vacated, so the final coverage counts every cell the
    // reference run ever reached.
    ratios.push_back(r.log[400].coverage / r.log[2000].coverage);
  }
  const double m = median(ratios);
  return {m >= 0.95, "coverage@400 / cells reached by 2000, per seed " + join(ratios) +
                         ", median " + fmt(m) + " (need >= 0.95)"};
}

// Shared by both seeding-trend criteria.
constexpr int kTrendRepeats = 5;
constexpr std::uint64_t kTrendSeed = 300;

fs::path trend_pool() {
  const fs::path pool = g_work / "clustered_high_ground.json";
  if (!fs::exists(pool)) {
    if (cli("gen-seeds --mode clustered_high --n 30 --env ground --rng-seed 11 --out \"" +
            pool.string() + "\"") != 0) {
      throw std::runtime_error("gen-seeds failed");
    }
  }
  return pool;
}

constexpr int kFitnessTrendIterations = 2000;

Outcome seeding_fitness_trend() {
  const fs::path root = fresh_dir("seeding_fitness");
  const fs::path pool = trend_pool();
  if (cli("run --env ground --condition h0,h25 --repeats " + std::to_string(kTrendRepeats) +
          " --iterations " + std::to_string(kFitnessTrendIterations) + " --rng-seed " +
          std::to_string(kTrendSeed) + " --seeds-file \"" + pool.string() + "\" --out \"" +
          root.string() + "\" 2>/dev/null") != 0) {
    return {false, "run failed"};
  }
  const auto h0 = runs_of(root, "h0");
  const auto h25 = runs_of(root, "h25");
  const std::vector<double> p50{50.0};
  int wins = 0;
  std::string detail = "50% milestone (H25 vs H0):";
  for (int k = 0; k < kTrendRepeats; ++k) {
    const auto a = fitness_milestones(h25[k].log, p50, MilestoneMode::kMean)[0];
    const auto b = fitness_milestones(h0[k].log, p50, MilestoneMode::kMean)[0];
    // A milestone never reached counts as slower than any reached one.
    const int ia = a.value_or(kFitnessTrendIterations + 1);
    const int ib = b.value_or(kFitnessTrendIterations + 1);
    if (ia < ib) ++wins;
    detail += " " + std::to_string(ia) + "/" + std::to_string(ib);
  }
  return {wins >= 4, detail + "; H25 faster in " + std::to_string(wins) + " of 5 (need 4)"};
}

constexpr int kCoverageTrendIterations = 300;

Outcome seeding_coverage_trend() {
  const fs::path root = fresh_dir("seeding_coverage");
  const fs::path pool = trend_pool();
  if (cli("run --env ground --condition h0,h5,h15,h25,h30 --repeats " +
          std::to_string(kTrendRepeats) + " --iterations " +
          std::to_string(kCoverageTrendIterations) + " --rng-seed " + std::to_string(kTrendSeed) +
          " --seeds-file \"" + pool.string() + "\" --out \"" + root.string() + "\" 2>/dev/null") !=
      0) {
    return {false, "run failed"};
  }
  const std::vector<double> p50{50.0};
  std::vector<double> medians;
  for (const char* c : {"h0", "h5", "h15", "h25", "h30"}) {
    std::vector<int> its;
    for (const auto& r : runs_of(root, c)) {
      its.push_back(coverage_milestones(r.log, p50)[0].value_or(kCoverageTrendIterations + 1));
    }
    medians.push_back(median(its));
  }
  const bool monotone = std::is_sorted(medians.begin(), medians.end());
  return {monotone, "median iterations to 50% coverage H0..H30 " + join(medians) +
                        " (need non-decreasing)"};
}

Outcome mirror_metamorphic() {
  Rng rng(5150);
  std::vector<Genome> genomes;
  for (int i = 0; i < 100; ++i) genomes.push_back(random_genome(rng));
  int failures = 0;
  int total = 0;
  double worst = 0.0;
  std::string envs;
  for (const Terrain& t : {Terrain::ground(), Terrain::sine()}) {
    for (const auto& g : genomes) {
      const SimResult a = simulate(g, t);
      const SimResult b = simulate(mirror(g), t);
      const double err = std::max(std::abs(a.dx - b.dx), std::abs(a.dy + b.dy));
      worst = std::max(worst, err);
      ++total;
      if (!(err <= 1e-6)) ++failures;
    }
  }
  return {failures == 0, std::to_string(total - failures) + "/" + std::to_string(total) +
                             " (genome, terrain) pairs within 1e-6 cm, worst error " +
                             fmt(worst, 3) + " cm"};
}

// Exact two-sided p by enumerating every split of the pooled sample.
std::pair<double, double> enumerate_u(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  const int n = static_cast<int>(pooled.size());
  const int n1 = static_cast<int>(x.size());
  auto u_of = [&](unsigned mask) {
    double u = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      for (int j = 0; j < n; ++j) {
        if (mask >> j & 1u) continue;
        u += pooled[i] > pooled[j] ? 1.0 : pooled[i] == pooled[j] ? 0.5 : 0.0;
      }
    }
    return u;
  };
  const double u_obs = u_of((1u << n1) - 1u);
  const double centre = n1 * static_cast<double>(n - n1) / 2.0;
  double extreme = 0.0;
  double count = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != n1) continue;
    ++count;
    if (std::abs(u_of(mask) - centre) >= std::abs(u_obs - centre)) ++extreme;
  }
  return {u_obs, extreme / count};
}

Outcome mann_whitney() {
  Rng rng(77);
  int cases = 0;
  int bad = 0;
  double worst_p = 0.0;
  for (int n1 = 1; n1 <= 11; ++n1) {
    for (int n2 = 1; n1 + n2 <= 12; ++n2) {
      for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> x(n1), y(n2);
        // Trial 0 draws from a tiny alphabet so ties are common.
        for (auto& v : x) v = trial == 0 ? rng.uniform_int(0, 3) : rng.uniform(0.0, 1.0);
        for (auto& v : y) v = trial == 0 ? rng.uniform_int(0, 3) : rng.uniform(0.2, 1.2);
        const auto got = mann_whitney_u(x, y);
        const auto [u, p] = enumerate_u(x, y);
        ++cases;
        worst_p = std::max(worst_p, std::abs(got.p_two_sided - p));
        if (got.u != u || std::abs(got.p_two_sided - p) > 1e-12 || !got.exact) ++bad;
      }
    }
  }
  int prop_bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n1 = rng.uniform_int(1, 30);
    const int n2 = rng.uniform_int(1, 30);
    std::vector<double> x(n1), y(n2);
    for (auto& v : x) v = rng.uniform(-5.0, 5.0);
    for (auto& v : y) v = rng.uniform(-5.0, 5.0);
    if (mann_whitney_u(x, y).u + mann_whitney_u(y, x).u != static_cast<double>(n1 * n2)) ++prop_bad;
  }
  return {bad == 0 && prop_bad == 0,
          std::to_string(cases) + " size pairs/trials vs enumeration, " + std::to_string(bad) +
              " mismatches, max |dp| " + fmt(worst_p, 3) + "; U symmetry violated in " +
              std::to_string(prop_bad) + "/1000"};
}

// Selection by repeated scans: the best remaining record whose user is
// still under the cap, ties broken by user then iteration.
std::vector<const SeedRecord*> greedy_oracle(const SeedPool& pool, int n, int cap) {
  std::vector<const SeedRecord*> out;
  std::vector<bool> used(pool.records.size(), false);
  std::map<std::string, int> taken;
  while (static_cast<int>(out.size()) < n) {
    int best = -1;
    for (std::size_t i = 0; i < pool.records.size(); ++i) {
      const auto& r = pool.records[i];
      if (used[i] || taken[r.user_id] >= cap) continue;
      if (best < 0) {
        best = static_cast<int>(i);
        continue;
      }
      const auto& b = pool.records[best];
      const bool better = r.recorded_fitness > b.recorded_fitness ||
                          (r.recorded_fitness == b.recorded_fitness &&
                           (r.user_id < b.user_id ||
                            (r.user_id == b.user_id && r.iteration < b.iteration)));
      if (better) best = static_cast<int>(i);
    }
    if (best < 0) break;
    used[best] = true;
    ++taken[pool.records[best].user_id];
    out.push_back(&pool.records[best]);
  }
  return out;
}

Outcome seed_selection() {
  Rng rng(31);
  const std::pair<int, int> conditions[] = {{5, 1}, {15, 2}, {25, 3}, {30, 3}};
  int pools = 0;
  int bad = 0;
  for (int trial = 0; trial < 50; ++trial) {
    // 13 users with 11 designs each; coarse fitness values create ties.
    SeedPool pool;
    for (int u = 1; u <= 13; ++u) {
      for (int it = 0; it <= 10; ++it) {
        SeedRecord r;
        r.user_id = "u" + std::to_string(u);
        r.environment = "ground";
        r.iteration = it;
        r.genome = random_genome(rng);
        r.recorded_fitness = rng.uniform_int(0, 40) * 0.5;
        pool.records.push_back(std::move(r));
      }
    }
    for (const auto& [n, cap] : conditions) {
      ++pools;
      const auto got = select_seeds(pool, n, cap);
      const auto want = greedy_oracle(pool, n, cap);
      bool same = got.size() == want.size();
      for (std::size_t i = 0; same && i < got.size(); ++i) same = got[i] == *want[i];
      if (!same) ++bad;
    }
  }
  return {bad == 0, std::to_string(pools) + " (pool, condition) cases, " + std::to_string(bad) +
                        " differ from the greedy oracle"};
}

Outcome reliability_precision_full() {
  Rng rng(8);
  std::vector<Archive> runs(2);
  int misplaced = 0;
  for (auto& a : runs) {
    for (int r = 0; r < kMapSize; ++r) {
      for (int c = 0; c < kMapSize; ++c) {
        const Cell cell{r, c};
        Genome g = testing::genome_for_cell(cell);
        if (!(bin_of(features(g)) == cell)) ++misplaced;
        a.insert(make_individual(std::move(g), rng.uniform(-10.0, 100.0), {}));
      }
    }
  }
  const auto rp = reliability_precision(runs);
  bool equal = true;
  std::string detail;
  for (std::size_t i = 0; i < rp.size(); ++i) {
    equal = equal && rp[i].reliability == rp[i].precision;
    detail += "run" + std::to_string(i) + " coverage " + fmt(runs[i].occupied() / 400.0) +
              " reliability " + fmt(rp[i].reliability, 17) + " precision " +
              fmt(rp[i].precision, 17) + "; ";
  }
  const bool full = runs[0].occupied() == kNumCells && runs[1].occupied() == kNumCells;
  return {equal && full && misplaced == 0, detail + "bit-exact equality required"};
}

struct Criterion {
  std::string name;
  std::function<Outcome()> fn;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> kAll{
      {"determinism", determinism},
      {"archive_oracle", archive_oracle},
      {"fitness_formula", fitness_formula},
      {"coverage_dynamics", coverage_dynamics},
      {"seeding_fitness_trend", seeding_fitness_trend},
      {"seeding_coverage_trend", seeding_coverage_trend},
      {"mirror_metamorphic", mirror_metamorphic},
      {"mann_whitney", mann_whitney},
      {"seed_selection", seed_selection},
      {"reliability_equals_precision", reliability_precision_full},
  };
  return kAll;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only.push_back(argv[++i]);
    } else if (a == "--work" && i + 1 < argc) {
      g_work = argv[++i];
    } else if (a == "--list") {
      for (const auto& c : criteria()) std::cout << c.name << "\n";
      return 0;
    } else {
      std::cerr << "usage: acceptance [--only NAME]... [--list] [--work DIR]\n";
      return 2;
    }
  }
  fs::create_directories(g_work);
  int failed = 0;
  int ran = 0;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " ["
              << fmt(secs, 3) << " s]" << std::endl;
    if (!o.pass) ++failed;
  }
  if (ran == 0) {
    std::cerr << "no criterion matched\n";
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
